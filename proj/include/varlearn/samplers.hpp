#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "pointcloud.hpp"
#include "polynomial.hpp"
#include "rng.hpp"

namespace varlearn {

// Noise applied to a finished sample: exact pass-through, rounding to a fixed
// number of decimals, or i.i.d. Gaussian offsets per coordinate.
struct Noise {
    enum class Kind { None, RoundDigits, Gaussian };
    Kind kind = Kind::None;
    int digits = 0;
    double sigma = 0.0;

    static Noise none() { return {}; }
    static Noise round_digits(int k) {
        Noise n;
        n.kind = Kind::RoundDigits;
        n.digits = k;
        return n;
    }
    static Noise gaussian(double sigma) {
        Noise n;
        n.kind = Kind::Gaussian;
        n.sigma = sigma;
        return n;
    }
};

inline PointCloud perturb(const PointCloud& cloud, const Noise& noise,
                          std::uint64_t seed = 0) {
    PointCloud out = cloud;
    switch (noise.kind) {
    case Noise::Kind::None:
        break;
    case Noise::Kind::RoundDigits: {
        if (noise.digits < 0)
            throw invalid_input("perturb: digits must be >= 0");
        const double scale = detail::pow_int(10.0, noise.digits);
        for (int i = 0; i < out.m(); ++i)
            for (int j = 0; j < out.n(); ++j)
                out.points(i, j) = std::round(out.points(i, j) * scale) / scale;
        break;
    }
    case Noise::Kind::Gaussian: {
        if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma))
            throw invalid_input("perturb: sigma must be finite and >= 0");
        if (noise.sigma == 0.0) break;
        Rng rng(seed);
        for (int i = 0; i < out.m(); ++i)
            for (int j = 0; j < out.n(); ++j)
                out.points(i, j) += noise.sigma * rng.gaussian();
        break;
    }
    }
    return out;
}

// Points on the smooth plane quartic
//   144 (x^4 + y^4) - 225 (x^2 + y^2) + 350 x^2 y^2 + 81 = 0.
// One coordinate is drawn uniformly from [-1, 1] and the defining equation
// is solved for the other; the fixed role alternates between x and y each
// draw. In the fixed coordinate the equation is a quadratic in the square of
// the free one, solved in the cancellation-free form.
inline PointCloud sample_trott(int m, std::uint64_t seed) {
    if (m < 1) throw invalid_input("sample_trott: m must be >= 1");
    Rng rng(seed);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(m);
    bool solve_for_y = true;
    while (static_cast<int>(pts.size()) < m) {
        const double c = rng.uniform(-1.0, 1.0);
        const bool fix_x = solve_for_y;
        solve_for_y = !solve_for_y;

        const double c2 = c * c;
        const double b = 350.0 * c2 - 225.0;
        const double c0 = (144.0 * c2 - 225.0) * c2 + 81.0;
        const double disc = b * b - 576.0 * c0;
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));

        double squares[2];
        int count = 0;
        squares[count++] = qq / 144.0;
        if (qq != 0.0) squares[count++] = c0 / qq;

        std::vector<double> roots;
        for (int i = 0; i < count; ++i) {
            if (squares[i] > 0.0) {
                const double r = std::sqrt(squares[i]);
                roots.push_back(-r);
                roots.push_back(r);
            } else if (squares[i] == 0.0) {
                roots.push_back(0.0);
            }
        }
        std::sort(roots.begin(), roots.end());
        for (double r : roots) {
            if (static_cast<int>(pts.size()) == m) break;
            if (fix_x)
                pts.push_back({c, r});
            else
                pts.push_back({r, c});
        }
    }

    Eigen::MatrixXd out(m, 2);
    for (int i = 0; i < m; ++i) {
        out(i, 0) = pts[i][0];
        out(i, 1) = pts[i][1];
    }
    return PointCloud{std::move(out), Ambient::Euclidean};
}

// Rotation matrices from QR factorization of a 3x3 standard Gaussian, with
// the diagonal of R forced positive by column sign flips. A reflection
// (determinant -1) is repaired by negating the last column. Row-major
// flatten to R^9.
inline PointCloud sample_so3(int m, std::uint64_t seed) {
    if (m < 1) throw invalid_input("sample_so3: m must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd out(m, 9);
    for (int k = 0; k < m; ++k) {
        Eigen::Matrix3d g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = rng.gaussian();
        const Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
        Eigen::Matrix3d q = qr.householderQ();
        const Eigen::Matrix3d r = qr.matrixQR();
        for (int j = 0; j < 3; ++j)
            if (r(j, j) < 0.0) q.col(j) = -q.col(j);
        if (q.determinant() < 0.0) q.col(2) = -q.col(2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out(k, 3 * i + j) = q(i, j);
    }
    return PointCloud{std::move(out), Ambient::Euclidean};
}

// Products of p-by-r and r-by-q standard Gaussian factors: matrices of rank
// at most r (and equal to r almost surely), flattened row-major to R^(pq).
inline PointCloud sample_low_rank(int m, int p, int q, int r,
                                  std::uint64_t seed) {
    if (m < 1) throw invalid_input("sample_low_rank: m must be >= 1");
    if (p < 1 || q < 1)
        throw invalid_input("sample_low_rank: matrix shape must be positive");
    if (r < 1 || r > std::min(p, q))
        throw invalid_input("sample_low_rank: need 1 <= r <= min(p, q)");
    Rng rng(seed);
    Eigen::MatrixXd out(m, p * q);
    Eigen::MatrixXd left(p, r), right(r, q);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < r; ++j) left(i, j) = rng.gaussian();
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < q; ++j) right(i, j) = rng.gaussian();
        const Eigen::MatrixXd prod = left * right;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < q; ++j) out(k, q * i + j) = prod(i, j);
    }
    return PointCloud{std::move(out), Ambient::Euclidean};
}

// Monomial parametrization given by an integer exponent matrix A with r rows
// and n columns: positive parameters t (exponentials of Gaussians, drawn in
// index order) map to the point with coordinates prod_i t_i^(A_ij).
inline PointCloud sample_toric(const Eigen::MatrixXi& A, int m,
                               std::uint64_t seed) {
    const int r = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (r < 1 || n < 1)
        throw invalid_input("sample_toric: empty exponent matrix");
    for (int j = 0; j < n; ++j) {
        bool nonzero = false;
        for (int i = 0; i < r; ++i) nonzero = nonzero || A(i, j) != 0;
        if (!nonzero)
            throw invalid_input("sample_toric: exponent matrix has a zero column");
    }
    if (m < 1) throw invalid_input("sample_toric: m must be >= 1");

    Rng rng(seed);
    Eigen::MatrixXd out(m, n);
    std::vector<double> t(r);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < r; ++i) t[i] = std::exp(rng.gaussian());
        for (int j = 0; j < n; ++j) {
            double v = 1.0;
            for (int i = 0; i < r; ++i) {
                const int e = A(i, j);
                if (e > 0)
                    v *= detail::pow_int(t[i], e);
                else if (e < 0)
                    v /= detail::pow_int(t[i], -e);
            }
            out(k, j) = v;
        }
    }
    return PointCloud{std::move(out), Ambient::Euclidean};
}

// The 20 linearly independent quadrics vanishing on rotation matrices, with
// X read row-major as x1..x9: the nine entries of X^T X - I, the first two
// diagonal entries of X X^T - I, and the nine cofactor relations
// cof_ij(X) = x_ij expressing the inverse-equals-transpose identity.
inline std::vector<Polynomial> so3_quadrics() {
    auto var = [](int i, int j) { return 3 * i + j; };
    auto quad = [&](int a, int b, double c) {
        Term t;
        t.c = c;
        t.e.assign(9, 0);
        t.e[a] += 1;
        t.e[b] += 1;
        return t;
    };
    auto lin = [&](int a, double c) {
        Term t;
        t.c = c;
        t.e.assign(9, 0);
        t.e[a] = 1;
        return t;
    };
    auto constant = [&](double c) {
        Term t;
        t.c = c;
        t.e.assign(9, 0);
        return t;
    };

    std::vector<Polynomial> out;
    out.reserve(20);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            std::vector<Term> terms;
            for (int k = 0; k < 3; ++k)
                terms.push_back(quad(var(k, i), var(k, j), 1.0));
            if (i == j) terms.push_back(constant(-1.0));
            out.emplace_back(9, std::move(terms));
        }
    }
    for (int i = 0; i < 2; ++i) {
        std::vector<Term> terms;
        for (int k = 0; k < 3; ++k)
            terms.push_back(quad(var(i, k), var(i, k), 1.0));
        terms.push_back(constant(-1.0));
        out.emplace_back(9, std::move(terms));
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int r0 = i == 0 ? 1 : 0, r1 = i == 2 ? 1 : 2;
            const int c0 = j == 0 ? 1 : 0, c1 = j == 2 ? 1 : 2;
            const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
            std::vector<Term> terms{quad(var(r0, c0), var(r1, c1), sign),
                                    quad(var(r0, c1), var(r1, c0), -sign),
                                    lin(var(i, j), -1.0)};
            out.emplace_back(9, std::move(terms));
        }
    }
    return out;
}

// Squared distances along an eight-atom ring given as 24 interleaved
// coordinates (atom k occupies entries 3k..3k+2): bond[k] between atoms k
// and k+1, skip[k] between atoms k and k+2, indices mod 8.
struct RingDistances {
    std::array<double, 8> bond{};
    std::array<double, 8> skip{};
};

namespace detail {

inline void check_conformation(const Eigen::VectorXd& conf, const char* who) {
    if (conf.size() != 24)
        throw invalid_input(std::string(who) +
                            ": conformation must have 24 coordinates");
}

} // namespace detail

inline RingDistances cyclooctane_ring_distances(const Eigen::VectorXd& conf) {
    detail::check_conformation(conf, "cyclooctane_ring_distances");
    RingDistances out;
    for (int k = 0; k < 8; ++k) {
        const auto a = conf.segment<3>(3 * k);
        const auto b = conf.segment<3>(3 * ((k + 1) % 8));
        const auto c = conf.segment<3>(3 * ((k + 2) % 8));
        out.bond[k] = (a - b).squaredNorm();
        out.skip[k] = (a - c).squaredNorm();
    }
    return out;
}

// Coordinate-wise sums over the eight atoms; zero exactly when the
// conformation is centered at the origin.
inline Eigen::Vector3d cyclooctane_centering(const Eigen::VectorXd& conf) {
    detail::check_conformation(conf, "cyclooctane_centering");
    Eigen::Vector3d sums = Eigen::Vector3d::Zero();
    for (int k = 0; k < 8; ++k) sums += conf.segment<3>(3 * k);
    return sums;
}

} // namespace varlearn
