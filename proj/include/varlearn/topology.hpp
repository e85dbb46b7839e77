#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <varlearn/errors.hpp>
#include <varlearn/numformat.hpp>
#include <varlearn/parallel.hpp>
#include <varlearn/pointcloud.hpp>

// Topology of a sample at every scale: Vietoris-Rips flag filtrations built
// on a distance matrix, persistent homology over Z/2 by boundary-matrix
// reduction, and the sample-size bound that guarantees homotopy recovery
// from a dense enough sample.

namespace varlearn {

// Flag filtration of a distance matrix. Each simplex carries the radius at
// which it enters: half the widest pairwise distance among its vertices, so
// vertices sit at 0 and an edge appears once the two balls of radius eps
// touch. Simplices are listed by (value, dimension, vertex tuple), which
// puts every face before its cofaces.
struct Filtration {
    std::vector<std::pair<std::vector<int>, double>> simplices;
    int max_dim = 0;
    double max_scale = 1.0;
};

struct PersistenceInterval {
    double birth = 0.0;
    double death = 0.0;  // +infinity for classes alive at max_scale
};

// Intervals grouped by homology degree; dims[p] is sorted by (birth, death).
struct Barcode {
    std::vector<std::vector<PersistenceInterval>> dims;
};

// Default ceiling on the total simplex count. Flag complexes grow as m^(k+1)
// once the scale passes the sample diameter, so runaway inputs fail fast
// instead of exhausting memory.
inline constexpr long long default_simplex_cap = 50'000'000;

namespace detail {

inline void check_barcode_inputs(const DistanceMatrix& dist, int max_dim,
                                 double max_scale) {
    if (dist.d.rows() < 1 || dist.d.rows() != dist.d.cols())
        throw invalid_input("vietoris_rips: distance matrix is empty or not square");
    if (max_dim < 0)
        throw invalid_input("vietoris_rips: max_dim must be nonnegative");
    if (!(max_scale > 0.0 && max_scale <= 1.0))
        throw invalid_input("vietoris_rips: max_scale must lie in (0, 1]");
}

// Simplices of one dimension in filtration order, vertex tuples flattened
// k entries at a time.
struct SimplexLayer {
    int k = 1;
    std::vector<int> verts;
    std::vector<double> values;
    long long size() const { return static_cast<long long>(values.size()); }
};

// Enumerates every clique through `root` whose other vertices are larger,
// in lexicographic order, up to `top` + 1 vertices. emit receives the sorted
// vertex tuple and its filtration value and returns false to stop early.
template <typename Emit>
void expand_cliques(const Eigen::MatrixXd& D,
                    const std::vector<std::vector<int>>& nbr, int top, int root,
                    Emit&& emit) {
    if (top < 1 || nbr[root].empty()) return;
    std::vector<int> cur;
    cur.reserve(top + 1);
    cur.push_back(root);
    std::vector<std::vector<int>> pool(top);
    pool[0] = nbr[root];
    bool alive = true;
    auto rec = [&](auto&& self, int depth, double value) -> void {
        const auto& cand = pool[depth];
        for (std::size_t i = 0; i < cand.size() && alive; ++i) {
            const int c = cand[i];
            double v = value;
            for (int u : cur) v = std::max(v, D(u, c) / 2.0);
            cur.push_back(c);
            alive = emit(cur, v);
            const int dim = static_cast<int>(cur.size()) - 1;
            if (alive && dim < top) {
                auto& next = pool[depth + 1];
                next.clear();
                const auto& nb = nbr[c];
                std::set_intersection(cand.begin() + i + 1, cand.end(),
                                      nb.begin(), nb.end(),
                                      std::back_inserter(next));
                if (!next.empty()) self(self, depth + 1, v);
            }
            cur.pop_back();
        }
    };
    rec(rec, 0, 0.0);
}

// Builds the flag complex as per-dimension layers, counting first so the
// cap is enforced before any simplex storage is allocated.
inline std::vector<SimplexLayer> flag_layers(const DistanceMatrix& dist,
                                             int max_dim, double max_scale,
                                             long long cap) {
    const int m = dist.m();
    const Eigen::MatrixXd& D = dist.d;
    const int top = max_dim + 1;

    std::vector<std::vector<int>> nbr(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (D(i, j) / 2.0 <= max_scale) nbr[i].push_back(j);

    std::vector<std::vector<long long>> counts(m,
                                               std::vector<long long>(top + 1, 0));
    std::atomic<long long> total{m};
    std::atomic<bool> over{static_cast<long long>(m) > cap};

    parallel_for(m, [&](std::size_t root) {
        if (over.load(std::memory_order_relaxed)) return;
        expand_cliques(D, nbr, top, static_cast<int>(root),
                       [&](const std::vector<int>& cur, double) {
                           counts[root][cur.size() - 1]++;
                           if (total.fetch_add(1, std::memory_order_relaxed) + 1 > cap) {
                               over.store(true, std::memory_order_relaxed);
                               return false;
                           }
                           return true;
                       });
    });
    if (over.load())
        throw capacity_error("vietoris_rips: flag complex exceeds the simplex cap " +
                             std::to_string(cap) +
                             "; lower max_scale or subsample the cloud");

    std::vector<SimplexLayer> layers(top + 1);
    for (int p = 0; p <= top; ++p) layers[p].k = p + 1;

    layers[0].values.assign(m, 0.0);
    layers[0].verts.resize(m);
    std::iota(layers[0].verts.begin(), layers[0].verts.end(), 0);

    // disjoint slice per root and dimension, so the fill can run in parallel
    std::vector<std::vector<long long>> offset(m,
                                               std::vector<long long>(top + 1, 0));
    std::vector<long long> sizes(top + 1, 0);
    for (int p = 1; p <= top; ++p) {
        for (int root = 0; root < m; ++root) {
            offset[root][p] = sizes[p];
            sizes[p] += counts[root][p];
        }
        layers[p].values.resize(sizes[p]);
        layers[p].verts.resize(sizes[p] * (p + 1));
    }

    parallel_for(m, [&](std::size_t root) {
        auto cursor = offset[root];
        expand_cliques(D, nbr, top, static_cast<int>(root),
                       [&](const std::vector<int>& cur, double value) {
                           const int p = static_cast<int>(cur.size()) - 1;
                           auto& layer = layers[p];
                           const long long at = cursor[p]++;
                           layer.values[at] = value;
                           std::copy(cur.begin(), cur.end(),
                                     layer.verts.begin() + at * (p + 1));
                           return true;
                       });
    });

    // Sort each layer by value. The fill above is already lexicographic, so
    // a stable sort leaves ties ordered by vertex tuple.
    for (int p = 1; p <= top; ++p) {
        auto& layer = layers[p];
        const long long count = layer.size();
        std::vector<long long> idx(count);
        std::iota(idx.begin(), idx.end(), 0ll);
        std::stable_sort(idx.begin(), idx.end(), [&](long long a, long long b) {
            return layer.values[a] < layer.values[b];
        });
        std::vector<double> values(count);
        std::vector<int> verts(count * (p + 1));
        for (long long i = 0; i < count; ++i) {
            values[i] = layer.values[idx[i]];
            std::copy(layer.verts.begin() + idx[i] * (p + 1),
                      layer.verts.begin() + (idx[i] + 1) * (p + 1),
                      verts.begin() + i * (p + 1));
        }
        layer.values = std::move(values);
        layer.verts = std::move(verts);
    }
    return layers;
}

struct TupleHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : v)
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) +
                 (h >> 2);
        return h;
    }
};

inline void xor_sorted(std::vector<int>& a, const std::vector<int>& b,
                       std::vector<int>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(scratch));
    a.swap(scratch);
}

// Column reduction over Z/2, one dimension at a time from the top down so
// that columns already known to be cycles (pivots of the dimension above)
// are cleared instead of reduced. A column that ends nonzero pairs its
// pivot row with the column: one finite interval. Rows never killed are
// the immortal classes. Zero-length intervals are real merges in degree 0
// (coincident points) but reduction artifacts above, so only degree 0
// keeps them.
inline Barcode reduce_layers(const std::vector<SimplexLayer>& layers,
                             int max_dim) {
    const double inf = std::numeric_limits<double>::infinity();
    const int top = static_cast<int>(layers.size()) - 1;

    Barcode out;
    out.dims.assign(max_dim + 1, {});

    std::vector<std::vector<char>> killed(top + 1), creator(top + 1);
    for (int p = 0; p <= top; ++p) {
        killed[p].assign(layers[p].size(), 0);
        creator[p].assign(layers[p].size(), 0);
    }

    std::vector<int> col, facet, scratch;
    for (int p = top; p >= 1; --p) {
        const auto& rows = layers[p - 1];
        const auto& cols = layers[p];
        if (cols.size() == 0) continue;

        std::unordered_map<std::vector<int>, int, TupleHash> row_of;
        row_of.reserve(static_cast<std::size_t>(rows.size()));
        {
            std::vector<int> key(p);
            for (long long r = 0; r < rows.size(); ++r) {
                key.assign(rows.verts.begin() + r * p,
                           rows.verts.begin() + (r + 1) * p);
                row_of.emplace(key, static_cast<int>(r));
            }
        }

        std::vector<int> pivot_owner(rows.size(), -1);
        std::vector<std::vector<int>> stored;

        for (long long c = 0; c < cols.size(); ++c) {
            if (killed[p][c]) {
                // died above, so its boundary column is a cycle: skip it
                creator[p][c] = 1;
                continue;
            }
            col.clear();
            const int* vs = cols.verts.data() + c * (p + 1);
            for (int drop = 0; drop <= p; ++drop) {
                facet.clear();
                for (int i = 0; i <= p; ++i)
                    if (i != drop) facet.push_back(vs[i]);
                col.push_back(row_of.at(facet));
            }
            std::sort(col.begin(), col.end());

            while (!col.empty()) {
                const int owner = pivot_owner[col.back()];
                if (owner < 0) break;
                xor_sorted(col, stored[owner], scratch);
            }
            if (col.empty()) {
                creator[p][c] = 1;
                continue;
            }
            const int low = col.back();
            pivot_owner[low] = static_cast<int>(stored.size());
            stored.push_back(col);
            killed[p - 1][low] = 1;

            const double birth = rows.values[low];
            const double death = cols.values[c];
            if (p - 1 <= max_dim && (p == 1 || death > birth))
                out.dims[p - 1].push_back({birth, death});
        }
    }

    for (int p = 0; p <= max_dim && p <= top; ++p) {
        const auto& layer = layers[p];
        for (long long s = 0; s < layer.size(); ++s) {
            const bool born = p == 0 || creator[p][s];
            if (born && !killed[p][s])
                out.dims[p].push_back({layer.values[s], inf});
        }
    }

    for (auto& bars : out.dims)
        std::sort(bars.begin(), bars.end(),
                  [](const PersistenceInterval& a, const PersistenceInterval& b) {
                      return a.birth < b.birth ||
                             (a.birth == b.birth && a.death < b.death);
                  });
    return out;
}

}  // namespace detail

inline Filtration flag_filtration(const DistanceMatrix& dist, int max_dim,
                                  double max_scale,
                                  long long simplex_cap = default_simplex_cap) {
    detail::check_barcode_inputs(dist, max_dim, max_scale);
    const auto layers = detail::flag_layers(dist, max_dim, max_scale, simplex_cap);

    Filtration out;
    out.max_dim = max_dim;
    out.max_scale = max_scale;
    long long total = 0;
    for (const auto& layer : layers) total += layer.size();
    out.simplices.reserve(static_cast<std::size_t>(total));
    for (const auto& layer : layers) {
        const int k = layer.k;
        for (long long s = 0; s < layer.size(); ++s)
            out.simplices.emplace_back(
                std::vector<int>(layer.verts.begin() + s * k,
                                 layer.verts.begin() + (s + 1) * k),
                layer.values[s]);
    }
    std::sort(out.simplices.begin(), out.simplices.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second < b.second;
                  if (a.first.size() != b.first.size())
                      return a.first.size() < b.first.size();
                  return a.first < b.first;
              });
    return out;
}

inline Barcode vietoris_rips_barcode(const DistanceMatrix& dist, int max_dim,
                                     double max_scale,
                                     long long simplex_cap = default_simplex_cap) {
    detail::check_barcode_inputs(dist, max_dim, max_scale);
    const auto layers = detail::flag_layers(dist, max_dim, max_scale, simplex_cap);
    return detail::reduce_layers(layers, max_dim);
}

// Inputs of the sample-size bound: intrinsic dimension, reach, d-volume and
// the acceptable failure probability.
struct NswParameters {
    int d = 1;
    double tau = 1.0;
    double nu = 1.0;
    double delta = 0.5;
};

// Number of uniform samples that recovers the homotopy type with
// probability at least 1 - delta: the smallest integer strictly above
// beta * (ln(beta) + d + ln(1/delta)) with beta = 16^d tau^-d nu. The
// guarantee is proven for d up to 17; beyond that the optional flag is set
// and the formula is still evaluated.
inline long long nsw_bound(const NswParameters& p,
                           bool* dimension_warning = nullptr) {
    if (p.d < 1) throw invalid_input("nsw_bound: dimension must be at least 1");
    if (!(p.tau > 0.0)) throw invalid_input("nsw_bound: reach must be positive");
    if (!(p.nu > 0.0)) throw invalid_input("nsw_bound: volume must be positive");
    if (!(p.delta > 0.0 && p.delta < 1.0))
        throw invalid_input("nsw_bound: failure probability must lie in (0, 1)");
    if (dimension_warning) *dimension_warning = p.d > 17;

    const double beta = std::pow(16.0, p.d) * std::pow(p.tau, -p.d) * p.nu;
    const double x = beta * (std::log(beta) + p.d + std::log(1.0 / p.delta));
    if (!(x < 9.0e18))
        throw capacity_error("nsw_bound: required sample size " +
                             detail::format_double(x) +
                             " exceeds the 64-bit integer range");
    return static_cast<long long>(std::floor(x)) + 1;
}

}  // namespace varlearn
