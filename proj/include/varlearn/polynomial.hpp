#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numformat.hpp"

namespace varlearn {

struct Term {
    double c = 0.0;
    std::vector<int> e; // exponent per variable
};

namespace detail {

inline int term_degree(const std::vector<int>& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

// Canonical monomial order: total degree ascending; within a degree,
// graded reverse-lexicographic with the leading monomial first (a precedes b
// when the last nonzero entry of a-b is negative).
inline bool monomial_precedes(const std::vector<int>& a, const std::vector<int>& b) {
    const int da = term_degree(a), db = term_degree(b);
    if (da != db) return da < db;
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

// x^k by repeated squaring; exact for integer bases while products stay
// within double range.
inline double pow_int(double x, int k) {
    double r = 1.0, b = x;
    while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

} // namespace detail

// Sparse multivariate polynomial over a fixed variable count. Terms are kept
// in the canonical monomial order with duplicates combined and zeros dropped.
class Polynomial {
public:
    explicit Polynomial(int n = 1) : n_(n) {
        if (n < 1) throw invalid_input("polynomial: variable count must be >= 1");
    }

    Polynomial(int n, std::vector<Term> raw) : Polynomial(n) {
        for (auto& t : raw) {
            if (static_cast<int>(t.e.size()) != n)
                throw invalid_input("polynomial: exponent vector length mismatch");
            for (int e : t.e)
                if (e < 0) throw invalid_input("polynomial: negative exponent");
        }
        std::stable_sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) {
            return detail::monomial_precedes(a.e, b.e);
        });
        for (auto& t : raw) {
            if (!terms_.empty() && terms_.back().e == t.e)
                terms_.back().c += t.c;
            else
                terms_.push_back(std::move(t));
        }
        std::erase_if(terms_, [](const Term& t) { return t.c == 0.0; });
    }

    int n() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int total_degree() const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, detail::term_degree(t.e));
        return d;
    }

    double evaluate(const Eigen::VectorXd& u) const {
        if (u.size() != n_)
            throw invalid_input("evaluate: coordinate length mismatch");
        double sum = 0.0;
        for (const auto& t : terms_) {
            double prod = t.c;
            for (int i = 0; i < n_; ++i)
                if (t.e[i] != 0) prod *= detail::pow_int(u(i), t.e[i]);
            sum += prod;
        }
        return sum;
    }

    Polynomial derivative(int var) const {
        if (var < 0 || var >= n_) throw invalid_input("derivative: bad variable");
        std::vector<Term> out;
        for (const auto& t : terms_) {
            if (t.e[var] == 0) continue;
            Term d = t;
            d.c *= d.e[var];
            d.e[var] -= 1;
            out.push_back(std::move(d));
        }
        return Polynomial(n_, std::move(out));
    }

    // Appends variable x_{n+1} and pads every term to the total degree.
    Polynomial homogenized() const {
        const int d = total_degree();
        std::vector<Term> out;
        for (const auto& t : terms_) {
            Term h = t;
            h.e.push_back(d - detail::term_degree(t.e));
            out.push_back(std::move(h));
        }
        return Polynomial(n_ + 1, std::move(out));
    }

    // Coefficients rounded to `digits` decimal places, half away from zero.
    Polynomial rounded(int digits) const {
        if (digits < 0) throw invalid_input("rounded: digits must be >= 0");
        const double scale = std::pow(10.0, digits);
        std::vector<Term> out;
        for (const auto& t : terms_) {
            Term r = t;
            r.c = std::round(t.c * scale) / scale;
            out.push_back(std::move(r));
        }
        return Polynomial(n_, std::move(out));
    }

    // Scaled so the largest-magnitude coefficient becomes 1 in absolute value.
    Polynomial normalized() const {
        if (terms_.empty()) return *this;
        double top = 0.0;
        for (const auto& t : terms_) top = std::max(top, std::abs(t.c));
        std::vector<Term> out = terms_;
        for (auto& t : out) t.c /= top;
        return Polynomial(n_, std::move(out));
    }

    // Same polynomial over a larger variable count.
    Polynomial widened(int new_n) const {
        if (new_n < n_) throw invalid_input("widened: cannot shrink");
        std::vector<Term> out = terms_;
        for (auto& t : out) t.e.resize(new_n, 0);
        return Polynomial(new_n, std::move(out));
    }

    bool operator==(const Polynomial& other) const {
        if (n_ != other.n_ || terms_.size() != other.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].c != other.terms_[i].c || terms_[i].e != other.terms_[i].e)
                return false;
        return true;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        if (a.n_ != b.n_) throw invalid_input("polynomial +: variable mismatch");
        std::vector<Term> out = a.terms_;
        out.insert(out.end(), b.terms_.begin(), b.terms_.end());
        return Polynomial(a.n_, std::move(out));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        return a + (-1.0 * b);
    }

    friend Polynomial operator*(double s, const Polynomial& p) {
        std::vector<Term> out = p.terms_;
        for (auto& t : out) t.c *= s;
        return Polynomial(p.n_, std::move(out));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.n_ != b.n_) throw invalid_input("polynomial *: variable mismatch");
        std::vector<Term> out;
        out.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                Term t;
                t.c = ta.c * tb.c;
                t.e.resize(a.n_);
                for (int i = 0; i < a.n_; ++i) t.e[i] = ta.e[i] + tb.e[i];
                out.push_back(std::move(t));
            }
        }
        return Polynomial(a.n_, std::move(out));
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& t : terms_) {
            const bool neg = t.c < 0;
            if (first) {
                if (neg) out += '-';
                first = false;
            } else {
                out += neg ? " - " : " + ";
            }
            const double mag = std::abs(t.c);
            std::string mono;
            for (int i = 0; i < n_; ++i) {
                if (t.e[i] == 0) continue;
                if (!mono.empty()) mono += '*';
                mono += 'x';
                mono += std::to_string(i + 1);
                if (t.e[i] > 1) {
                    mono += '^';
                    mono += std::to_string(t.e[i]);
                }
            }
            if (mono.empty()) {
                out += detail::format_double(mag);
            } else if (mag == 1.0) {
                out += mono;
            } else {
                out += detail::format_double(mag);
                out += '*';
                out += mono;
            }
        }
        return out;
    }

    // Parses the text format: terms of coefficient and x<i>[^k] factors joined
    // by + and -, with "**" accepted as a power alias. With n = 0 the variable
    // count is the largest index mentioned.
    static Polynomial parse(const std::string& text, int n = 0) {
        struct Factor {
            double coeff = 1.0;
            std::vector<std::pair<int, int>> vars; // (index, exponent)
        };
        std::vector<Factor> parsed;
        std::vector<int> signs;

        std::size_t i = 0;
        const auto skip_ws = [&] {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
                i++;
        };
        int max_var = 0;

        skip_ws();
        if (i == text.size()) throw parse_error("polynomial: empty input");
        while (i < text.size()) {
            int sign = 1;
            skip_ws();
            if (text[i] == '+' || text[i] == '-') {
                sign = text[i] == '-' ? -1 : 1;
                i++;
            } else if (!parsed.empty()) {
                throw parse_error("polynomial: expected '+' or '-' between terms");
            }
            skip_ws();
            Factor f;
            bool saw_factor = false;
            bool expect_factor = false;
            for (;;) {
                skip_ws();
                if (i >= text.size()) break;
                const char c = text[i];
                if (c == '+' || c == '-') break;
                if (c == '*') {
                    if (!saw_factor)
                        throw parse_error("polynomial: '*' without preceding factor");
                    i++;
                    expect_factor = true;
                    continue;
                }
                if (c == 'x' || c == 'X') {
                    i++;
                    std::size_t start = i;
                    while (i < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[i])))
                        i++;
                    if (start == i)
                        throw parse_error("polynomial: variable without index");
                    const int idx = std::atoi(text.substr(start, i - start).c_str());
                    if (idx < 1) throw parse_error("polynomial: variable index < 1");
                    int exp = 1;
                    skip_ws();
                    if (i < text.size() &&
                        (text[i] == '^' ||
                         (text[i] == '*' && i + 1 < text.size() && text[i + 1] == '*'))) {
                        i += text[i] == '^' ? 1 : 2;
                        skip_ws();
                        std::size_t es = i;
                        while (i < text.size() &&
                               std::isdigit(static_cast<unsigned char>(text[i])))
                            i++;
                        if (es == i) throw parse_error("polynomial: missing exponent");
                        exp = std::atoi(text.substr(es, i - es).c_str());
                    }
                    f.vars.emplace_back(idx - 1, exp);
                    max_var = std::max(max_var, idx);
                    saw_factor = true;
                    expect_factor = false;
                    continue;
                }
                // Coefficient literal.
                char* endp = nullptr;
                const double v = std::strtod(text.c_str() + i, &endp);
                if (endp == text.c_str() + i)
                    throw parse_error("polynomial: unexpected character '" +
                                      std::string(1, c) + "'");
                i = endp - text.c_str();
                f.coeff *= v;
                saw_factor = true;
                expect_factor = false;
            }
            if (!saw_factor || expect_factor)
                throw parse_error("polynomial: incomplete term");
            f.coeff *= sign;
            parsed.push_back(std::move(f));
            signs.push_back(sign);
            skip_ws();
        }

        const int nv = n > 0 ? n : std::max(max_var, 1);
        if (max_var > nv)
            throw parse_error("polynomial: variable index exceeds variable count");
        std::vector<Term> terms;
        for (const auto& f : parsed) {
            Term t;
            t.c = f.coeff;
            t.e.assign(nv, 0);
            for (auto [idx, exp] : f.vars) t.e[idx] += exp;
            terms.push_back(std::move(t));
        }
        return Polynomial(nv, std::move(terms));
    }

private:
    int n_;
    std::vector<Term> terms_;
};

// Entry (i, j) = d f_i / d x_j at u, via symbolic partials.
inline Eigen::MatrixXd jacobian(const std::vector<Polynomial>& F,
                                const Eigen::VectorXd& u) {
    if (F.empty()) throw invalid_input("jacobian: empty polynomial set");
    const int n = F.front().n();
    Eigen::MatrixXd J(F.size(), n);
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (F[i].n() != n) throw invalid_input("jacobian: variable mismatch");
        for (int j = 0; j < n; ++j)
            J(static_cast<int>(i), j) = F[i].derivative(j).evaluate(u);
    }
    return J;
}

// One polynomial per line; '#' starts a comment line; blank lines skipped.
// All polynomials are widened to the largest variable count in the file.
inline std::vector<Polynomial> read_polynomials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::vector<Polynomial> polys;
    std::string line;
    std::size_t lineno = 0;
    int nmax = 1;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            polys.push_back(Polynomial::parse(line));
        } catch (const parse_error& e) {
            throw parse_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        nmax = std::max(nmax, polys.back().n());
    }
    if (polys.empty()) throw parse_error(path + ": no polynomials");
    for (auto& p : polys)
        if (p.n() < nmax) p = p.widened(nmax);
    return polys;
}

inline void write_polynomials(const std::string& path,
                              const std::vector<Polynomial>& polys) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write '" + path + "'");
    for (const auto& p : polys) out << p.to_string() << '\n';
}

enum class BasisMode { DegreeAtMost, DegreeExactly };

// Ordered monomial basis: degrees ascending, grevlex within each degree.
struct MonomialBasis {
    int n = 1;
    int degree = 0;
    BasisMode mode = BasisMode::DegreeAtMost;
    std::vector<std::vector<int>> exponents;

    int index_of(const std::vector<int>& e) const {
        auto it = std::lower_bound(exponents.begin(), exponents.end(), e,
                                   detail::monomial_precedes);
        if (it == exponents.end() || *it != e) return -1;
        return static_cast<int>(it - exponents.begin());
    }
};

namespace detail {

inline double binomial(int a, int b) {
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r *= static_cast<double>(a - b + i) / i;
    return r;
}

inline void enumerate_degree(int n, int d, std::vector<int>& cur, int pos, int left,
                             std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        cur[pos] = left;
        out.push_back(cur);
        return;
    }
    for (int k = left; k >= 0; --k) {
        cur[pos] = k;
        enumerate_degree(n, d, cur, pos + 1, left - k, out);
    }
    cur[pos] = 0;
}

} // namespace detail

inline MonomialBasis monomial_basis(int n, int d, BasisMode mode) {
    if (n < 1) throw invalid_input("monomial_basis: n must be >= 1");
    if (d < 0) throw invalid_input("monomial_basis: degree must be >= 0");
    const double count = mode == BasisMode::DegreeAtMost
                             ? detail::binomial(n + d, d)
                             : detail::binomial(n + d - 1, d);
    if (count > 2147483647.0)
        throw capacity_error("monomial_basis: basis exceeds index range");

    MonomialBasis basis;
    basis.n = n;
    basis.degree = d;
    basis.mode = mode;
    const int lo = mode == BasisMode::DegreeAtMost ? 0 : d;
    std::vector<int> cur(n, 0);
    for (int deg = lo; deg <= d; ++deg)
        detail::enumerate_degree(n, deg, cur, 0, deg, basis.exponents);
    std::sort(basis.exponents.begin(), basis.exponents.end(),
              detail::monomial_precedes);
    return basis;
}

} // namespace varlearn
