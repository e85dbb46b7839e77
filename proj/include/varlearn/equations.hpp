#pragma once

#include "varlearn/errors.hpp"
#include "varlearn/parallel.hpp"
#include "varlearn/pointcloud.hpp"
#include "varlearn/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace varlearn {

// Evaluation matrix of a monomial basis over a sample: row i holds every
// basis monomial evaluated at point i.
struct VandermondeMatrix {
    Eigen::MatrixXd matrix;
    MonomialBasis basis;
};

inline VandermondeMatrix vandermonde(const PointCloud& cloud,
                                     const MonomialBasis& basis) {
    if (basis.n != cloud.n())
        throw invalid_input("vandermonde: basis and cloud variable counts differ");
    if (cloud.m() < 1) throw invalid_input("vandermonde: empty sample");

    const int m = cloud.m();
    const int n = cloud.n();
    const int N = static_cast<int>(basis.exponents.size());

    VandermondeMatrix out;
    out.basis = basis;
    out.matrix.resize(m, N);
    parallel_for(m, [&](std::size_t i) {
        // Per-point powers, computed the same way polynomial evaluation does.
        std::vector<std::vector<double>> pw(n);
        for (int v = 0; v < n; ++v) {
            pw[v].resize(basis.degree + 1);
            for (int k = 0; k <= basis.degree; ++k)
                pw[v][k] = detail::pow_int(cloud.points(static_cast<int>(i), v), k);
        }
        for (int j = 0; j < N; ++j) {
            double prod = 1.0;
            for (int v = 0; v < n; ++v)
                if (basis.exponents[j][v] != 0) prod *= pw[v][basis.exponents[j][v]];
            out.matrix(static_cast<int>(i), j) = prod;
        }
    });
    return out;
}

namespace detail {

inline std::vector<double> compute_singular_values(const Eigen::MatrixXd& M) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

} // namespace detail

// Full spectrum, largest first; for inspecting where the rank cut lands.
inline std::vector<double> singular_values(const VandermondeMatrix& U) {
    return detail::compute_singular_values(U.matrix);
}

// Policy for turning a singular value spectrum into a rank decision.
struct ToleranceRule {
    enum class Kind { Machine, Gap, Fixed };

    Kind kind = Kind::Gap;
    double fixed_tau = 0.0;
    // A log10 drop must be at least this wide before the gap rule cuts there.
    double gap_decades = 2.0;

    static ToleranceRule machine() { return {Kind::Machine, 0.0, 0.0}; }
    static ToleranceRule gap(double decades = 2.0) {
        return {Kind::Gap, 0.0, decades};
    }
    static ToleranceRule fixed(double tau) { return {Kind::Fixed, tau, 0.0}; }
};

struct RankResult {
    int rank = 0;
    double tau = 0.0;
};

// Rank = number of singular values at or above the threshold the rule picks.
// The machine rule scales machine epsilon by the top singular value and the
// matrix extent; the gap rule cuts mid-gap at the widest log10 drop starting
// from a value at or above the machine floor, falling back to the machine
// threshold when no drop is significant.
inline RankResult numerical_rank(const std::vector<double>& sigma,
                                 const ToleranceRule& rule, int m, int N) {
    if (sigma.empty()) throw invalid_input("numerical_rank: empty spectrum");
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (sigma[i] < 0.0)
            throw invalid_input("numerical_rank: negative singular value");
        if (i > 0 && sigma[i] > sigma[i - 1])
            throw invalid_input("numerical_rank: spectrum must be nonincreasing");
    }
    if (rule.kind == ToleranceRule::Kind::Fixed && rule.fixed_tau < 0.0)
        throw invalid_input("numerical_rank: fixed tolerance must be >= 0");

    if (sigma[0] == 0.0) return {0, 0.0};

    const double eps = std::numeric_limits<double>::epsilon();
    const double machine_tau = eps * sigma[0] * std::max(m, N);

    double tau = machine_tau;
    switch (rule.kind) {
    case ToleranceRule::Kind::Fixed:
        tau = rule.fixed_tau;
        break;
    case ToleranceRule::Kind::Machine:
        tau = machine_tau;
        break;
    case ToleranceRule::Kind::Gap: {
        int best = -1;
        double best_gap = 0.0;
        for (std::size_t i = 0; i + 1 < sigma.size(); ++i) {
            // Values below the machine floor are indistinguishable from
            // zero, so a drop between two of them is not a cut point.
            if (sigma[i] < machine_tau) break;
            const double gap = sigma[i + 1] > 0.0
                                   ? std::log10(sigma[i]) - std::log10(sigma[i + 1])
                                   : std::numeric_limits<double>::infinity();
            if (gap > best_gap) {
                best = static_cast<int>(i);
                best_gap = gap;
            }
        }
        if (best >= 0 && best_gap >= rule.gap_decades)
            tau = (sigma[best] + sigma[best + 1]) / 2.0;
        break;
    }
    }

    int rank = 0;
    for (double s : sigma)
        if (s >= tau) ++rank;
    return {rank, tau};
}

enum class KernelMethod { SVD, QR, RREF };

// Kernel of a Vandermonde matrix expressed as polynomials over its basis,
// plus the spectrum and the rank decision that produced it.
struct EquationSet {
    std::vector<Polynomial> polynomials;
    std::vector<double> sigma;
    double tau = 0.0;
    int rank = 0;
};

namespace detail {

inline Polynomial vector_to_polynomial(const Eigen::VectorXd& v,
                                       const MonomialBasis& basis) {
    std::vector<Term> terms;
    for (int j = 0; j < v.size(); ++j)
        if (v(j) != 0.0) terms.push_back({v(j), basis.exponents[j]});
    return Polynomial(basis.n, std::move(terms));
}

inline std::vector<Eigen::VectorXd> kernel_vectors_svd(const Eigen::MatrixXd& M,
                                                       int kernel_dim) {
    const int N = static_cast<int>(M.cols());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    std::vector<Eigen::VectorXd> out;
    for (int j = N - kernel_dim; j < N; ++j)
        out.push_back(svd.matrixV().col(j));
    return out;
}

inline std::vector<Eigen::VectorXd> kernel_vectors_qr(const Eigen::MatrixXd& M,
                                                      double tau) {
    const int m = static_cast<int>(M.rows());
    const int N = static_cast<int>(M.cols());
    const int diag = std::min(m, N);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    const Eigen::MatrixXd R =
        qr.matrixQR().topRows(diag).triangularView<Eigen::Upper>();

    // Column pivoting orders the diagonal by decreasing magnitude, so the
    // dependent columns form a suffix of the pivoted order.
    int r = 0;
    while (r < diag && std::abs(R(r, r)) >= tau) ++r;

    std::vector<Eigen::VectorXd> out;
    for (int i = r; i < N; ++i) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
        a(i) = 1.0;
        if (r > 0) {
            const Eigen::VectorXd y = R.topLeftCorner(r, r)
                                          .triangularView<Eigen::Upper>()
                                          .solve(R.block(0, i, r, 1));
            a.head(r) = -y;
        }
        out.push_back(qr.colsPermutation() * a);
    }
    return out;
}

inline std::vector<Eigen::VectorXd> kernel_vectors_rref(const Eigen::MatrixXd& M,
                                                        double tau, double sigma1) {
    const int m = static_cast<int>(M.rows());
    const int N = static_cast<int>(M.cols());

    // Row reduction with partial pivoting at machine scale; the tolerance
    // enters afterwards, through the row and pivot filters.
    Eigen::MatrixXd A = M;
    const double eps = std::numeric_limits<double>::epsilon();
    const double tiny = eps * A.cwiseAbs().maxCoeff() * std::max(m, N);
    int row = 0;
    for (int col = 0; col < N && row < m; ++col) {
        int piv = row;
        for (int i = row + 1; i < m; ++i)
            if (std::abs(A(i, col)) > std::abs(A(piv, col))) piv = i;
        if (std::abs(A(piv, col)) <= tiny) continue;
        A.row(piv).swap(A.row(row));
        A.row(row) /= A(row, col);
        A(row, col) = 1.0;
        for (int i = 0; i < m; ++i) {
            if (i == row || A(i, col) == 0.0) continue;
            A.row(i) -= A(i, col) * A.row(row);
            A(i, col) = 0.0;
        }
        ++row;
    }

    // The reduced rows sit on a unit-pivot scale while tau is calibrated
    // against the singular values of the input, so compare relative to the
    // top singular value. Under the machine rule this is the familiar
    // eps * max(m, N) relative threshold.
    const double rel = sigma1 > 0.0 ? tau / sigma1 : tau;

    std::vector<int> kept;
    for (int i = 0; i < m; ++i)
        if (A.row(i).norm() > std::sqrt(static_cast<double>(N)) * rel)
            kept.push_back(i);

    std::vector<int> pivot_col(kept.size(), -1);
    std::vector<bool> is_pivot(N, false);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (int j = 0; j < N; ++j) {
            if (std::abs(A(kept[i], j)) > rel) {
                pivot_col[i] = j;
                is_pivot[j] = true;
                break;
            }
        }
        if (pivot_col[i] < 0)
            throw degenerate_sample("kernel_basis: reduced row has no pivot");
    }

    std::vector<Eigen::VectorXd> out;
    for (int j = 0; j < N; ++j) {
        if (is_pivot[j]) continue;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
        a(j) = 1.0;
        for (std::size_t i = 0; i < kept.size(); ++i)
            a(pivot_col[i]) = -A(kept[i], j);
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace detail

inline EquationSet kernel_basis(const VandermondeMatrix& U,
                                const ToleranceRule& rule, KernelMethod method) {
    const int m = static_cast<int>(U.matrix.rows());
    const int N = static_cast<int>(U.matrix.cols());
    if (m < 1 || N < 1) throw invalid_input("kernel_basis: empty matrix");

    EquationSet out;
    out.sigma = detail::compute_singular_values(U.matrix);
    const RankResult rr = numerical_rank(out.sigma, rule, m, N);
    out.tau = rr.tau;

    std::vector<Eigen::VectorXd> vectors;
    switch (method) {
    case KernelMethod::SVD:
        if (N - rr.rank > 0)
            vectors = detail::kernel_vectors_svd(U.matrix, N - rr.rank);
        break;
    case KernelMethod::QR:
        vectors = detail::kernel_vectors_qr(U.matrix, rr.tau);
        break;
    case KernelMethod::RREF:
        vectors = detail::kernel_vectors_rref(U.matrix, rr.tau, out.sigma[0]);
        break;
    }

    out.rank = N - static_cast<int>(vectors.size());
    for (const auto& v : vectors)
        out.polynomials.push_back(detail::vector_to_polynomial(v, U.basis));
    return out;
}

// End-to-end search for polynomials vanishing on the sample: build the basis
// (exact degree if homogeneous, up to the degree otherwise), evaluate the
// Vandermonde matrix, and return its kernel.
inline EquationSet find_equations(const PointCloud& cloud, int degree,
                                  bool homogeneous, KernelMethod method,
                                  const ToleranceRule& rule) {
    if (cloud.m() < 2) throw invalid_input("find_equations: need at least 2 points");
    if (degree < 1) throw invalid_input("find_equations: degree must be >= 1");

    const MonomialBasis basis = monomial_basis(
        cloud.n(), degree,
        homogeneous ? BasisMode::DegreeExactly : BasisMode::DegreeAtMost);
    return kernel_basis(vandermonde(cloud, basis), rule, method);
}

} // namespace varlearn
