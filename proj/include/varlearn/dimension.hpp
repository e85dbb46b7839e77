#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <varlearn/errors.hpp>
#include <varlearn/pointcloud.hpp>
#include <varlearn/rng.hpp>

// Estimators for the intrinsic dimension of a finite point sample. All of
// them consume scale parameters on the normalized distance axis, where the
// largest pairwise distance of the sample equals one, and every estimate is
// clamped to [0, n] for an n-dimensional ambient space. A disengaged optional
// marks scales at which an estimator is undefined.

namespace varlearn {

// Cut rule for a principal component spectrum.
struct PcaRule {
    enum class Kind { Gap, Tolerance };
    Kind kind = Kind::Gap;
    double tau = 0.0;

    static PcaRule gap() { return {Kind::Gap, 0.0}; }
    static PcaRule tolerance(double tau) { return {Kind::Tolerance, tau}; }
};

namespace detail {

inline Eigen::VectorXd centered_singular_values(const Eigen::MatrixXd& points) {
    Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered);
    return svd.singularValues();
}

inline double clamp_to_ambient(double value, int n) {
    return std::clamp(value, 0.0, static_cast<double>(n));
}

// Angle between two nonzero vectors through the half-angle identity, exact
// at 0 and pi and well-conditioned everywhere.
inline double vector_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd na = a / a.norm();
    const Eigen::VectorXd nb = b / b.norm();
    return 2.0 * std::atan2((na - nb).norm(), (na + nb).norm());
}

// Affine chart for a projective sample: unit representatives scaled so that
// a fixed linear functional evaluates to one. Points too close to the
// functional's kernel are reported in `excluded` and get no chart row (their
// row is left untouched and must not be read).
inline void projective_chart(const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& functional,
                             Eigen::MatrixXd& chart, std::vector<int>& excluded) {
    const int m = static_cast<int>(points.rows());
    chart.resize(m, points.cols());
    excluded.clear();
    for (int i = 0; i < m; ++i) {
        const double norm = points.row(i).norm();
        if (norm == 0.0)
            throw invalid_input("projective chart: zero vector is not a projective point");
        const Eigen::VectorXd u = points.row(i).transpose() / norm;
        const double s = functional.dot(u);
        if (std::abs(s) < 1e-12) {
            excluded.push_back(i);
            continue;
        }
        chart.row(i) = u.transpose() / s;
    }
}

} // namespace detail

// Number of principal directions kept by the rule. The gap rule cuts the
// spectrum at its largest order-of-magnitude drop; if all singular values
// agree exactly there is no drop and the full spectrum is kept.
inline int pca_dimension(const Eigen::MatrixXd& points, const PcaRule& rule = PcaRule::gap()) {
    if (points.rows() < 1) throw invalid_input("pca_dimension: empty sample");
    if (rule.kind == PcaRule::Kind::Tolerance && !(rule.tau >= 0.0))
        throw invalid_input("pca_dimension: tolerance must be nonnegative");

    const Eigen::VectorXd sigma = detail::centered_singular_values(points);
    const int len = static_cast<int>(sigma.size());

    if (rule.kind == PcaRule::Kind::Tolerance) {
        int count = 0;
        while (count < len && sigma(count) >= rule.tau) ++count;
        return count;
    }

    if (sigma(0) == 0.0) return 0;
    // Singular values at the level of floating point noise are exact zeros
    // of the underlying sample; without this floor the log gaps between two
    // noise values can outweigh the real drop.
    const double noise = std::numeric_limits<double>::epsilon() * sigma(0) *
                         std::max(points.rows(), points.cols());
    int best = -1;
    double best_gap = 0.0;
    for (int i = 1; i < len; ++i) {
        const double gap = sigma(i) < noise
                               ? std::numeric_limits<double>::infinity()
                               : std::log10(sigma(i - 1)) - std::log10(sigma(i));
        if (gap > best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best < 0 ? len : best;
}

// Single-linkage clusters at scale eps, a principal component rank per
// cluster, and the cluster-size-weighted mean of those ranks. Projective
// samples are first moved to an affine chart; points on which the chart
// functional (drawn from the seeded generator) vanishes are excluded, and
// reported when `excluded_out` is given.
inline std::optional<double> npca_dimension(const PointCloud& cloud, double eps,
                                            std::uint64_t seed = 0,
                                            std::vector<int>* excluded_out = nullptr) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw invalid_input("npca_dimension: eps must lie in (0, 1]");
    const int m = cloud.m();
    const int n = cloud.n();
    if (m < 1) throw invalid_input("npca_dimension: empty sample");
    if (excluded_out) excluded_out->clear();
    if (m == 1) return 0.0;

    const DistanceMatrix dist = distance_matrix(cloud);
    const Clustering clusters = single_linkage_clusters(dist, eps);

    Eigen::MatrixXd coords;
    std::vector<char> usable(m, 1);
    if (cloud.ambient == Ambient::Projective) {
        Rng rng(seed);
        Eigen::VectorXd l(n);
        for (int j = 0; j < n; ++j) l(j) = rng.gaussian();
        l.normalize();
        std::vector<int> excluded;
        detail::projective_chart(cloud.points, l, coords, excluded);
        for (int i : excluded) usable[i] = 0;
        if (excluded_out) *excluded_out = excluded;
    } else {
        coords = cloud.points;
    }

    double num = 0.0, den = 0.0;
    for (const auto& members : clusters.members) {
        std::vector<int> kept;
        for (int i : members)
            if (usable[i]) kept.push_back(i);
        if (kept.empty()) continue;
        double local = 0.0;
        if (kept.size() > 1) {
            Eigen::MatrixXd rows(kept.size(), n);
            for (std::size_t r = 0; r < kept.size(); ++r) rows.row(r) = coords.row(kept[r]);
            local = pca_dimension(rows, PcaRule::gap());
        }
        num += static_cast<double>(kept.size()) * local;
        den += static_cast<double>(kept.size());
    }
    if (den == 0.0) return std::nullopt;
    return detail::clamp_to_ambient(num / den, n);
}

// Capacity dimension log(boxes hit) / log(subdivisions). The sample's
// bounding box is split into R equal intervals per coordinate, where R is
// chosen so one interval has roughly size eps on the normalized distance
// axis: the largest coordinate width is measured in units of the largest
// pairwise distance, which also makes the count invariant under uniform
// scaling. A projective sample moves to the affine chart over its coordinate
// of largest mean absolute value, and the normalized diameter is one by
// construction. One single box (eps at or above the sample width) carries no
// information and yields a missing value.
inline std::optional<double> box_counting_dimension(const PointCloud& cloud, double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw invalid_input("box_counting_dimension: eps must lie in (0, 1]");
    const int m = cloud.m();
    const int n = cloud.n();
    if (m < 1) throw invalid_input("box_counting_dimension: empty sample");
    if (m == 1) return 0.0;

    Eigen::MatrixXd coords;
    double lambda = 0.0;
    if (cloud.ambient == Ambient::Projective) {
        Eigen::MatrixXd unit(m, n);
        for (int i = 0; i < m; ++i) {
            const double norm = cloud.points.row(i).norm();
            if (norm == 0.0)
                throw invalid_input(
                    "box_counting_dimension: zero vector is not a projective point");
            unit.row(i) = cloud.points.row(i) / norm;
        }
        int pivot = 0;
        unit.cwiseAbs().colwise().mean().maxCoeff(&pivot);
        std::vector<int> kept;
        for (int i = 0; i < m; ++i)
            if (std::abs(unit(i, pivot)) >= 1e-12) kept.push_back(i);
        if (kept.empty()) return std::nullopt;
        if (kept.size() == 1) return 0.0;
        coords.resize(kept.size(), n);
        for (std::size_t r = 0; r < kept.size(); ++r)
            coords.row(r) = unit.row(kept[r]) / unit(kept[r], pivot);
        lambda = 1.0;
    } else {
        coords = cloud.points;
        double diameter = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                diameter =
                    std::max(diameter, (coords.row(i) - coords.row(j)).norm());
        if (diameter == 0.0) return 0.0;
        double width = 0.0;
        for (int j = 0; j < n; ++j)
            width = std::max(width, coords.col(j).maxCoeff() - coords.col(j).minCoeff());
        lambda = width / diameter;
    }

    const double boxes = std::floor(lambda / eps) + 1.0;
    if (boxes > 1e9)
        throw capacity_error("box_counting_dimension: subdivision count too large");
    const long long R = static_cast<long long>(boxes);
    if (R <= 1) return std::nullopt;

    const int rows = static_cast<int>(coords.rows());
    Eigen::VectorXd lo(n), width(n);
    for (int j = 0; j < n; ++j) {
        lo(j) = coords.col(j).minCoeff();
        width(j) = coords.col(j).maxCoeff() - lo(j);
    }
    std::set<std::vector<long long>> occupied;
    for (int i = 0; i < rows; ++i) {
        std::vector<long long> box(n, 0);
        for (int j = 0; j < n; ++j) {
            if (width(j) == 0.0) continue;
            const double q = std::floor(R * (coords(i, j) - lo(j)) / width(j));
            box[j] = std::min(static_cast<long long>(q), R - 1);
        }
        occupied.insert(std::move(box));
    }
    const double est =
        std::log(static_cast<double>(occupied.size())) / std::log(static_cast<double>(R));
    return detail::clamp_to_ambient(est, n);
}

// Dimension read off the total edge length of minimum spanning trees: a
// cluster of k points with mean tree edge length t estimates |log k / log t|.
// Singletons count as locally zero-dimensional; a cluster whose mean edge
// length is exactly one gives no reading and is dropped from the average.
inline std::optional<double> phcurve_dimension(const PointCloud& cloud, double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw invalid_input("phcurve_dimension: eps must lie in (0, 1]");
    const int m = cloud.m();
    if (m < 1) throw invalid_input("phcurve_dimension: empty sample");
    if (m == 1) return 0.0;

    const DistanceMatrix dist = distance_matrix(cloud);
    const Clustering clusters = single_linkage_clusters(dist, eps);

    double num = 0.0, den = 0.0;
    for (const auto& members : clusters.members) {
        const double k = static_cast<double>(members.size());
        if (members.size() == 1) {
            den += 1.0;
            continue;
        }
        const Mst tree = minimum_spanning_tree(dist, members);
        const double mean_edge = tree.total / (k - 1.0);
        if (mean_edge == 1.0) continue;
        num += k * std::abs(std::log(k) / std::log(mean_edge));
        den += k;
    }
    if (den == 0.0) return std::nullopt;
    return detail::clamp_to_ambient(num / den, cloud.n());
}

// Slope of the empirical pair-count curve between eps and eps + h, where
// C(r) is the fraction of unordered pairs strictly closer than r. On a
// projective sample the window lengths enter through their sines.
inline std::optional<double> correlation_dimension(const PointCloud& cloud, double eps,
                                                   double h) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw invalid_input("correlation_dimension: eps must lie in (0, 1]");
    if (!(h > 0.0)) throw invalid_input("correlation_dimension: h must be positive");
    if (eps + h > 1.0 + 1e-12)
        throw invalid_input("correlation_dimension: eps + h exceeds the distance scale");
    const int m = cloud.m();
    if (m < 2) return std::nullopt;

    const DistanceMatrix dist = distance_matrix(cloud);
    const double r2 = std::min(eps + h, 1.0);
    long long inside1 = 0, inside2 = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            if (dist.d(i, j) < eps) ++inside1;
            if (dist.d(i, j) < r2) ++inside2;
        }
    if (inside1 == 0) return std::nullopt;

    const double pairs = 0.5 * m * (m - 1.0);
    const double num = std::abs(std::log(inside1 / pairs) - std::log(inside2 / pairs));
    const double den = cloud.ambient == Ambient::Projective
                           ? std::abs(std::log(std::sin(eps)) - std::log(std::sin(r2)))
                           : std::abs(std::log(eps) - std::log(r2));
    if (den == 0.0) return std::nullopt;
    return detail::clamp_to_ambient(num / den, cloud.n());
}

// Maximum likelihood estimate from neighbor distances: a point with
// neighbors at distances T_1..T_k within eps contributes the reciprocal of
// the mean of log(eps / T_j), weighted by its neighborhood size k + 1. On a
// projective sample the distances enter through their sines. Points without
// neighbors give no reading; a reading of +infinity (all neighbors exactly
// at distance eps) is excluded from the average.
inline std::optional<double> mle_dimension(const PointCloud& cloud, double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw invalid_input("mle_dimension: eps must lie in (0, 1]");
    const int m = cloud.m();
    if (m < 1) throw invalid_input("mle_dimension: empty sample");
    if (m == 1) return std::nullopt;

    const DistanceMatrix dist = distance_matrix(cloud);
    const bool projective = cloud.ambient == Ambient::Projective;

    double num = 0.0, den = 0.0;
    for (int i = 0; i < m; ++i) {
        int k = 0;
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == i || dist.d(i, j) > eps) continue;
            ++k;
            sum += projective ? std::log(std::sin(eps) / std::sin(dist.d(i, j)))
                              : std::log(eps / dist.d(i, j));
        }
        if (k == 0) continue;
        if (sum == 0.0) continue;
        const double local = static_cast<double>(k) / sum;
        num += (k + 1.0) * local;
        den += k + 1.0;
    }
    if (den == 0.0) return std::nullopt;
    return detail::clamp_to_ambient(num / den, cloud.n());
}

// Mean squared deviation of pairwise neighbor angles from a right angle, on
// a d-dimensional sample, for large samples. Index d-1 holds the value for
// dimension d.
inline double anova_beta(int d) {
    if (d < 1) throw invalid_input("anova_beta: dimension must be at least 1");
    const double pi2 = M_PI * M_PI;
    if (d % 2 == 1) {
        const int s = (d - 1) / 2;
        double sum = 0.0;
        for (int j = 0; j < s; ++j) sum += 1.0 / ((2.0 * j + 1.0) * (2.0 * j + 1.0));
        return pi2 / 4.0 - 2.0 * sum;
    }
    const int s = (d - 2) / 2;
    double sum = 0.0;
    for (int j = 1; j <= s; ++j) sum += 1.0 / ((2.0 * j) * (2.0 * j));
    return pi2 / 12.0 - 2.0 * sum;
}

// Reference angle variances for dimensions 1..dmax.
struct AnovaConstants {
    int dmax = 0;
    std::vector<double> beta;
};

inline AnovaConstants anova_constants(int dmax) {
    if (dmax < 1) throw invalid_input("anova_constants: dmax must be at least 1");
    AnovaConstants c;
    c.dmax = dmax;
    c.beta.reserve(dmax);
    for (int d = 1; d <= dmax; ++d) c.beta.push_back(anova_beta(d));
    return c;
}

// Dimension whose reference variance is nearest to the observed one; ties
// resolve to the smaller dimension.
inline int anova_match_dimension(double s, const AnovaConstants& constants) {
    if (!(s >= 0.0)) throw invalid_input("anova_match_dimension: negative variance");
    if (constants.beta.empty()) throw invalid_input("anova_match_dimension: empty table");
    int best = 1;
    double best_diff = std::abs(constants.beta[0] - s);
    for (int d = 2; d <= static_cast<int>(constants.beta.size()); ++d) {
        const double diff = std::abs(constants.beta[d - 1] - s);
        if (diff < best_diff) {
            best_diff = diff;
            best = d;
        }
    }
    return best;
}

// Angle-variance estimate: for each point, the angles between all pairs of
// its neighbors (as seen from the point) are compared against the reference
// variances, and the matched dimensions are averaged with neighborhood-size
// weights. A projective sample measures angles after orthogonal projection
// onto the tangent space of the projective space at the distinguished point.
// Points with fewer than two usable neighbors give no reading.
inline std::optional<double> anova_dimension(const PointCloud& cloud, double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw invalid_input("anova_dimension: eps must lie in (0, 1]");
    const int m = cloud.m();
    const int n = cloud.n();
    if (m < 1) throw invalid_input("anova_dimension: empty sample");
    if (m == 1) return std::nullopt;

    const DistanceMatrix dist = distance_matrix(cloud);
    const bool projective = cloud.ambient == Ambient::Projective;
    const AnovaConstants constants = anova_constants(std::max(n, 30));
    const double half_pi = M_PI / 2.0;

    double num = 0.0, den = 0.0;
    for (int i = 0; i < m; ++i) {
        std::vector<Eigen::VectorXd> dirs;
        Eigen::VectorXd center;
        if (projective) {
            center = cloud.points.row(i).transpose();
            center /= center.norm();
        }
        for (int j = 0; j < m; ++j) {
            if (j == i || dist.d(i, j) > eps) continue;
            Eigen::VectorXd v;
            if (projective) {
                Eigen::VectorXd u = cloud.points.row(j).transpose();
                u /= u.norm();
                v = u - u.dot(center) * center;
                if (v.norm() < 1e-12) continue;
            } else {
                v = (cloud.points.row(j) - cloud.points.row(i)).transpose();
                if (v.norm() == 0.0) continue;
            }
            dirs.push_back(std::move(v));
        }
        const int k = static_cast<int>(dirs.size());
        if (k < 2) continue;

        double s = 0.0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                const double theta = detail::vector_angle(dirs[a], dirs[b]);
                s += (theta - half_pi) * (theta - half_pi);
            }
        s /= 0.5 * k * (k - 1.0);

        num += (k + 1.0) * anova_match_dimension(s, constants);
        den += k + 1.0;
    }
    if (den == 0.0) return std::nullopt;
    return detail::clamp_to_ambient(num / den, n);
}

// Estimates of every requested estimator on the uniform scale grid
// j / grid_size, j = 1..grid_size. The pair-count window h is one grid step;
// scales where an estimator is undefined hold a disengaged optional.
struct DimensionDiagram {
    std::vector<double> grid;
    std::map<std::string, std::vector<std::optional<double>>> curves;
};

inline DimensionDiagram dimension_diagram(const PointCloud& cloud,
                                          const std::vector<std::string>& estimators,
                                          int grid_size, std::uint64_t seed = 0) {
    static const std::vector<std::string> known{"NPCA", "BoxCounting", "PHCurve",
                                                "CorrSum", "MLE", "ANOVA"};
    if (grid_size < 2)
        throw invalid_input("dimension_diagram: grid size must be at least 2");
    if (estimators.empty())
        throw invalid_input("dimension_diagram: no estimators requested");
    for (const auto& name : estimators) {
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            std::string msg = "dimension_diagram: unknown estimator '" + name +
                              "' (valid:";
            for (const auto& k : known) msg += " " + k;
            msg += ")";
            throw invalid_input(msg);
        }
    }

    DimensionDiagram out;
    out.grid.reserve(grid_size);
    for (int j = 1; j <= grid_size; ++j)
        out.grid.push_back(static_cast<double>(j) / grid_size);
    const double h = 1.0 / grid_size;

    for (const auto& name : estimators) {
        auto& curve = out.curves[name];
        if (!curve.empty()) continue;
        curve.reserve(grid_size);
        for (double eps : out.grid) {
            std::optional<double> value;
            if (name == "NPCA") {
                value = npca_dimension(cloud, eps, seed);
            } else if (name == "BoxCounting") {
                value = box_counting_dimension(cloud, eps);
            } else if (name == "PHCurve") {
                value = phcurve_dimension(cloud, eps);
            } else if (name == "CorrSum") {
                value = eps + h <= 1.0 + 1e-12
                            ? correlation_dimension(cloud, eps, h)
                            : std::nullopt;
            } else if (name == "MLE") {
                value = mle_dimension(cloud, eps);
            } else {
                value = anova_dimension(cloud, eps);
            }
            curve.push_back(value);
        }
    }
    return out;
}

} // namespace varlearn
