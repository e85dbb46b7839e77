#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include <varlearn/errors.hpp>
#include <varlearn/polynomial.hpp>
#include <varlearn/rng.hpp>

// Monte-Carlo real degree and volume of a projective hypersurface: slice it
// with uniformly random projective lines, count the real intersection
// points of each slice, and turn the mean count into a volume through the
// kinematic formula.

namespace varlearn {

// A uniformly random line in projective n-space, spanned by two orthonormal
// vectors of R^(n+1).
struct ProjectiveLine {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
};

inline ProjectiveLine random_projective_line(int n, Rng& rng) {
    if (n < 1)
        throw invalid_input(
            "random_projective_line: ambient dimension must be >= 1");
    for (;;) {
        Eigen::VectorXd a(n + 1), b(n + 1);
        for (int i = 0; i <= n; ++i) a(i) = rng.gaussian();
        for (int i = 0; i <= n; ++i) b(i) = rng.gaussian();
        const double na = a.norm();
        if (na < 1e-8) continue;
        a /= na;
        b -= a.dot(b) * a;
        const double nb = b.norm();
        if (nb < 1e-8) continue;  // rank-deficient draw, try again
        b /= nb;
        return {a, b};
    }
}

// Coefficients of the binary form f(s*a + t*b); entry k multiplies
// s^(D-k) t^k where D is the degree of f.
inline std::vector<double> restrict_to_line(const Polynomial& f,
                                            const Eigen::VectorXd& a,
                                            const Eigen::VectorXd& b) {
    if (f.terms().empty())
        throw invalid_input("restrict_to_line: zero polynomial");
    if (a.size() != f.n() || b.size() != f.n())
        throw invalid_input(
            "restrict_to_line: line vectors need one entry per variable");
    const int deg = f.total_degree();
    for (const auto& t : f.terms())
        if (detail::term_degree(t.e) != deg)
            throw invalid_input("restrict_to_line: polynomial must be homogeneous");

    std::vector<double> out(deg + 1, 0.0);
    std::vector<double> conv, factor, next;
    for (const auto& term : f.terms()) {
        conv.assign(1, term.c);
        for (int var = 0; var < f.n(); ++var) {
            const int e = term.e[var];
            if (e == 0) continue;
            // (s*a_i + t*b_i)^e by the binomial theorem, indexed by t-power
            factor.assign(e + 1, 0.0);
            double binom = 1.0;
            for (int k = 0; k <= e; ++k) {
                factor[k] = binom * std::pow(a(var), e - k) * std::pow(b(var), k);
                binom = binom * (e - k) / (k + 1);
            }
            next.assign(conv.size() + e, 0.0);
            for (std::size_t i = 0; i < conv.size(); ++i)
                for (int k = 0; k <= e; ++k) next[i + k] += conv[i] * factor[k];
            conv.swap(next);
        }
        for (std::size_t i = 0; i < conv.size(); ++i) out[i] += conv[i];
    }
    return out;
}

// Number of distinct real zeros of a binary form on the projective line,
// coeffs[k] multiplying s^(D-k) t^k. Eigenvalues of the companion matrix
// with relative imaginary part up to 1e-8 pass as real, roots closer than
// 1e-6 (relative) collapse to one geometric point, and a vanishing
// t-leading coefficient contributes the point at infinity once.
inline int count_real_projective_roots(const std::vector<double>& coeffs) {
    if (coeffs.empty())
        throw invalid_input("count_real_projective_roots: empty coefficients");
    double norm = 0.0;
    for (double c : coeffs) norm += c * c;
    norm = std::sqrt(norm);
    if (norm == 0.0)
        throw invalid_input("count_real_projective_roots: zero form");

    const int deg = static_cast<int>(coeffs.size()) - 1;
    const double tiny = 1e-12 * norm;
    int eff = deg;
    while (eff > 0 && std::abs(coeffs[eff]) < tiny) --eff;

    int count = std::abs(coeffs[deg]) < tiny ? 1 : 0;  // point at infinity
    if (eff == 0) return count;

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(eff, eff);
    for (int i = 1; i < eff; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < eff; ++i) comp(i, eff - 1) = -coeffs[i] / coeffs[eff];
    const Eigen::VectorXcd roots =
        Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues();

    std::vector<double> real;
    for (int i = 0; i < roots.size(); ++i) {
        if (std::abs(roots(i).imag()) <= 1e-8 * std::max(1.0, std::abs(roots(i))))
            real.push_back(roots(i).real());
    }
    if (real.empty()) return count;
    std::sort(real.begin(), real.end());
    ++count;
    for (std::size_t i = 1; i < real.size(); ++i) {
        const double scale =
            std::max({1.0, std::abs(real[i - 1]), std::abs(real[i])});
        if (real[i] - real[i - 1] >= 1e-6 * scale) ++count;
    }
    return count;
}

// One slicing experiment: the per-trial real intersection counts, their
// mean (the real degree estimate), the kinematic volume and the spread of
// the counts.
struct SliceEstimate {
    int trials = 0;
    std::vector<int> counts;
    double deg_r = 0.0;
    double std_error = 0.0;   // stdev of the counts over sqrt(trials)
    double volume = 0.0;
    int d = 0;                // dimension entering the kinematic constant
    long long discarded = 0;  // lines inside the hypersurface, redrawn
};

inline double volume_estimate(double deg_r, int d) {
    if (deg_r < 0.0) throw invalid_input("volume_estimate: negative degree");
    if (d < 0) throw invalid_input("volume_estimate: negative dimension");
    return std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1)) * deg_r;
}

inline SliceEstimate real_degree_hypersurface(const Polynomial& f, int trials,
                                              Rng& rng) {
    if (trials < 1)
        throw invalid_input("real_degree_hypersurface: trials must be >= 1");
    if (f.n() < 2)
        throw invalid_input(
            "real_degree_hypersurface: need at least two variables");
    if (f.terms().empty())
        throw invalid_input("real_degree_hypersurface: zero polynomial");
    const int deg = f.total_degree();
    for (const auto& t : f.terms())
        if (detail::term_degree(t.e) != deg)
            throw invalid_input(
                "real_degree_hypersurface: polynomial must be homogeneous");

    double fnorm = 0.0;
    for (const auto& t : f.terms()) fnorm += t.c * t.c;
    fnorm = std::sqrt(fnorm);

    SliceEstimate est;
    est.trials = trials;
    est.d = f.n() - 2;
    est.counts.reserve(trials);

    const int n = f.n() - 1;
    for (int trial = 0; trial < trials; ++trial) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 10000)
                throw degenerate_sample(
                    "real_degree_hypersurface: every sampled line lies inside "
                    "the hypersurface");
            const auto line = random_projective_line(n, rng);
            const auto g = restrict_to_line(f, line.a, line.b);
            double gnorm = 0.0;
            for (double c : g) gnorm += c * c;
            if (std::sqrt(gnorm) < 1e-12 * fnorm) {
                est.discarded++;
                continue;
            }
            est.counts.push_back(count_real_projective_roots(g));
            break;
        }
    }

    double sum = 0.0;
    for (int c : est.counts) sum += c;
    est.deg_r = sum / trials;
    if (trials > 1) {
        double ss = 0.0;
        for (int c : est.counts)
            ss += (c - est.deg_r) * (c - est.deg_r);
        est.std_error =
            std::sqrt(ss / (trials - 1)) / std::sqrt(static_cast<double>(trials));
    }
    est.volume = volume_estimate(est.deg_r, est.d);
    return est;
}

}  // namespace varlearn
