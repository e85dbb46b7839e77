#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <varlearn/equations.hpp>
#include <varlearn/errors.hpp>
#include <varlearn/parallel.hpp>
#include <varlearn/pointcloud.hpp>
#include <varlearn/polynomial.hpp>

// Geometry of a variety at sample points, derived from polynomials that
// vanish on it: tangent spaces as Jacobian kernels, dimension as the modal
// Jacobian corank, the empirical reach, and tangent-aligned ellipsoid
// weights for distance matrices.

namespace varlearn {

// Estimated tangent space at one point: an orthonormal basis of the kernel
// of the Jacobian. When every gradient vanishes the point is singular for
// the equation set and the tangent space degenerates to the full ambient
// space, reported through the flag.
struct TangentEstimate {
    int index = -1;         // position in the sample, -1 for a free point
    Eigen::MatrixXd basis;  // n x corank, orthonormal columns
    int corank = 0;
    bool singular = false;
    double tau = 0.0;       // rank tolerance that produced the split
};

inline TangentEstimate tangent_space(const std::vector<Polynomial>& F,
                                     const Eigen::VectorXd& u,
                                     const ToleranceRule& rule = ToleranceRule::machine()) {
    if (F.empty()) throw invalid_input("tangent_space: empty polynomial set");
    const int n = static_cast<int>(u.size());

    const Eigen::MatrixXd J = jacobian(F, u);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
    std::vector<double> sigma(svd.singularValues().data(),
                              svd.singularValues().data() + svd.singularValues().size());

    const RankResult rr =
        numerical_rank(sigma, rule, static_cast<int>(J.rows()), n);

    TangentEstimate te;
    te.corank = n - rr.rank;
    te.basis = svd.matrixV().rightCols(te.corank);
    te.singular = sigma[0] == 0.0;
    te.tau = rr.tau;
    return te;
}

// Jacobian coranks across a sample: the per-value counts and their mode.
// Ties between equally common coranks resolve to the smaller one.
struct CorankSummary {
    int mode = 0;
    std::map<int, int> histogram;
};

inline CorankSummary corank_summary(const std::vector<Polynomial>& F,
                                    const PointCloud& cloud,
                                    const ToleranceRule& rule = ToleranceRule::machine()) {
    const int m = cloud.m();
    if (m < 1) throw invalid_input("corank_summary: empty sample");

    std::vector<int> coranks(m);
    parallel_for(m, [&](std::size_t i) {
        coranks[i] = tangent_space(F, cloud.points.row(i).transpose(), rule).corank;
    });

    CorankSummary out;
    for (int c : coranks) out.histogram[c]++;
    int best = -1;
    for (const auto& [corank, count] : out.histogram)
        if (count > best) {
            best = count;
            out.mode = corank;
        }
    return out;
}

inline int corank_dimension(const std::vector<Polynomial>& F, const PointCloud& cloud,
                            const ToleranceRule& rule = ToleranceRule::machine()) {
    return corank_summary(F, cloud, rule).mode;
}

// Smallest ratio |u-v|^2 / (2 * delta) over ordered sample pairs, where
// delta is the distance of u - v from the estimated tangent space at v.
// Pairs with delta below 1e-12 say nothing about curvature (the quotient
// blows up on tangentially aligned pairs) and are skipped; if every pair is
// skipped the data is flat as far as the sample can tell and the reach is
// infinite.
inline double empirical_reach(const PointCloud& cloud, const std::vector<Polynomial>& F,
                              const ToleranceRule& rule = ToleranceRule::machine()) {
    if (cloud.ambient != Ambient::Euclidean)
        throw invalid_input("empirical_reach: Euclidean samples only");
    const int m = cloud.m();
    if (m < 2) throw invalid_input("empirical_reach: need at least 2 points");

    std::vector<TangentEstimate> tangents(m);
    parallel_for(m, [&](std::size_t i) {
        tangents[i] = tangent_space(F, cloud.points.row(i).transpose(), rule);
    });

    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        const Eigen::MatrixXd& B = tangents[j].basis;
        for (int i = 0; i < m; ++i) {
            if (i == j) continue;
            const Eigen::VectorXd w = (cloud.points.row(i) - cloud.points.row(j)).transpose();
            const double delta = (w - B * (B.transpose() * w)).norm();
            if (delta < 1e-12) continue;
            best = std::min(best, w.squaredNorm() / (2.0 * delta));
        }
    }
    return best;
}

// Tangent-aligned ellipsoids: unit radius along the estimated tangent
// space, radius sqrt(lambda) along its orthogonal complement.
struct EllipsoidModel {
    double lambda = 1.0;
    std::vector<TangentEstimate> tangents;
};

inline EllipsoidModel ellipsoid_model(const PointCloud& cloud,
                                      const std::vector<Polynomial>& F, double lambda,
                                      const ToleranceRule& rule = ToleranceRule::machine()) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw invalid_input("ellipsoid_model: lambda must lie in (0, 1]");
    if (cloud.ambient != Ambient::Euclidean)
        throw invalid_input("ellipsoid_model: Euclidean samples only");
    if (cloud.m() < 1) throw invalid_input("ellipsoid_model: empty sample");

    EllipsoidModel model;
    model.lambda = lambda;
    model.tangents.resize(cloud.m());
    parallel_for(cloud.m(), [&](std::size_t i) {
        model.tangents[i] = tangent_space(F, cloud.points.row(i).transpose(), rule);
        model.tangents[i].index = static_cast<int>(i);
    });
    return model;
}

// Scaled distances reweighted by the mean ellipsoid radius along each
// separation direction: entry d_ij / ((sqrt(q_i) + sqrt(q_j)) / 2) with
// q = lambda + (1 - lambda) * |tangent component|^2. The reweighted
// distances stay on the same axis as the plain scaled distances, so
// barcodes built from the two matrices are directly comparable; entries
// are capped at one, which only touches pairs pushed past the sample
// diameter. At lambda = 1 every q is exactly one, the cap never binds,
// and the matrix equals the plain scaled distance matrix. Coincident
// points have no separation direction and keep distance zero.
inline DistanceMatrix ellipsoid_distance_matrix(const PointCloud& cloud,
                                                const std::vector<Polynomial>& F,
                                                double lambda,
                                                const ToleranceRule& rule = ToleranceRule::machine()) {
    const DistanceMatrix base = distance_matrix(cloud);
    const EllipsoidModel model = ellipsoid_model(cloud, F, lambda, rule);
    const int m = cloud.m();

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const Eigen::VectorXd w = (cloud.points.row(i) - cloud.points.row(j)).transpose();
            const double raw = w.norm();
            if (raw == 0.0) continue;
            const Eigen::VectorXd h = w / raw;
            const auto radius = [&](int p) {
                const Eigen::MatrixXd& B = model.tangents[p].basis;
                const double t =
                    std::clamp((B.transpose() * h).squaredNorm(), 0.0, 1.0);
                return std::sqrt(lambda + (1.0 - lambda) * t);
            };
            d(i, j) = std::min(1.0, base.d(i, j) / (0.5 * (radius(i) + radius(j))));
            d(j, i) = d(i, j);
        }
    }

    return DistanceMatrix{std::move(d), Metric::EllipsoidWeighted};
}

} // namespace varlearn
