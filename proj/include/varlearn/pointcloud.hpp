#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace varlearn {

enum class Ambient { Euclidean, Projective };

// A finite sample; one point per row.
struct PointCloud {
    Eigen::MatrixXd points;
    Ambient ambient = Ambient::Euclidean;

    int m() const { return static_cast<int>(points.rows()); }
    int n() const { return static_cast<int>(points.cols()); }
};

enum class Metric { ScaledEuclidean, ScaledFubiniStudy, EllipsoidWeighted };

// Symmetric, zero diagonal, entries in [0, 1] with max exactly 1.
struct DistanceMatrix {
    Eigen::MatrixXd d;
    Metric metric = Metric::ScaledEuclidean;

    int m() const { return static_cast<int>(d.rows()); }
};

// Pairwise distances rescaled so the largest is 1. Euclidean clouds use the
// Euclidean metric; projective clouds the angle arccos(|<u,v>|/(|u||v|)),
// which identifies antipodal representatives.
inline DistanceMatrix distance_matrix(const PointCloud& cloud) {
    const int m = cloud.m();
    if (m < 2) throw invalid_input("distance_matrix: need at least 2 points");

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    if (cloud.ambient == Ambient::Euclidean) {
        parallel_for(m, [&](std::size_t i) {
            for (int j = static_cast<int>(i) + 1; j < m; ++j)
                d(i, j) = (cloud.points.row(i) - cloud.points.row(j)).norm();
        });
    } else {
        Eigen::MatrixXd unit(m, cloud.n());
        for (int i = 0; i < m; ++i) {
            const double norm = cloud.points.row(i).norm();
            if (norm == 0.0)
                throw invalid_input(
                    "distance_matrix: zero vector is not a projective point");
            unit.row(i) = cloud.points.row(i) / norm;
        }
        // Angle between lines, arccos(|<u,v>|/(|u||v|)), evaluated through the
        // half-angle identity 2*atan2(|a-b|,|a+b|) on sign-aligned unit
        // representatives; identical value, but well-conditioned near 0.
        parallel_for(m, [&](std::size_t i) {
            for (int j = static_cast<int>(i) + 1; j < m; ++j) {
                const double sign = unit.row(i).dot(unit.row(j)) < 0.0 ? -1.0 : 1.0;
                const double diff = (unit.row(i) - sign * unit.row(j)).norm();
                const double sum = (unit.row(i) + sign * unit.row(j)).norm();
                d(i, j) = 2.0 * std::atan2(diff, sum);
            }
        });
    }

    double maxd = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) maxd = std::max(maxd, d(i, j));
    const double floor = cloud.ambient == Ambient::Projective ? 1e-12 : 0.0;
    if (maxd <= floor)
        throw degenerate_sample("distance_matrix: all points coincide");

    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double v = std::clamp(d(i, j) / maxd, 0.0, 1.0);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return DistanceMatrix{std::move(d),
                          cloud.ambient == Ambient::Euclidean
                              ? Metric::ScaledEuclidean
                              : Metric::ScaledFubiniStudy};
}

// Partition of point indices. Cluster ids are assigned by order of first
// appearance, so labels are deterministic.
struct Clustering {
    std::vector<int> labels;               // per point
    int count = 0;                         // number of clusters
    std::vector<std::vector<int>> members; // per cluster, ascending indices
    std::vector<int> sizes;                // per cluster
};

// Connected components of the graph with an edge wherever d_ij <= eps.
inline Clustering single_linkage_clusters(const DistanceMatrix& dist, double eps) {
    const int m = dist.m();
    if (m < 1) throw invalid_input("single_linkage_clusters: empty sample");
    if (!(eps >= 0.0)) throw invalid_input("single_linkage_clusters: eps < 0");

    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (dist.d(i, j) <= eps) {
                const int a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }

    Clustering out;
    out.labels.assign(m, -1);
    std::vector<int> id_of_root(m, -1);
    for (int i = 0; i < m; ++i) {
        const int r = find(i);
        if (id_of_root[r] < 0) {
            id_of_root[r] = out.count++;
            out.members.emplace_back();
        }
        out.labels[i] = id_of_root[r];
        out.members[out.labels[i]].push_back(i);
    }
    out.sizes.reserve(out.count);
    for (const auto& g : out.members) out.sizes.push_back(static_cast<int>(g.size()));
    return out;
}

struct MstEdge {
    int i = 0, j = 0; // original point indices, i < j
    double w = 0.0;
};

struct Mst {
    std::vector<MstEdge> edges;
    double total = 0.0;
};

// Dense Prim over the listed member indices. Ties between equal-weight
// candidate edges are broken by the lexicographically smallest (min,max)
// index pair, so the tree is deterministic.
inline Mst minimum_spanning_tree(const DistanceMatrix& dist,
                                 const std::vector<int>& members) {
    if (members.empty())
        throw invalid_input("minimum_spanning_tree: empty member list");
    for (int v : members)
        if (v < 0 || v >= dist.m())
            throw invalid_input("minimum_spanning_tree: member index out of range");

    const int k = static_cast<int>(members.size());
    Mst out;
    if (k == 1) return out;

    std::vector<int> order(members);
    std::sort(order.begin(), order.end());

    std::vector<bool> in_tree(k, false);
    // Best known connection of each outside vertex to the tree.
    std::vector<double> best_w(k, std::numeric_limits<double>::infinity());
    std::vector<int> best_from(k, -1);
    in_tree[0] = true;
    for (int t = 1; t < k; ++t) {
        best_w[t] = dist.d(order[0], order[t]);
        best_from[t] = order[0];
    }

    for (int step = 1; step < k; ++step) {
        int pick = -1;
        for (int t = 0; t < k; ++t) {
            if (in_tree[t]) continue;
            if (pick < 0) { pick = t; continue; }
            const double a = best_w[t], b = best_w[pick];
            if (a < b) { pick = t; continue; }
            if (a == b) {
                auto key = [&](int s) {
                    return std::pair<int, int>(std::min(best_from[s], order[s]),
                                               std::max(best_from[s], order[s]));
                };
                if (key(t) < key(pick)) pick = t;
            }
        }
        in_tree[pick] = true;
        MstEdge e;
        e.i = std::min(best_from[pick], order[pick]);
        e.j = std::max(best_from[pick], order[pick]);
        e.w = best_w[pick];
        out.edges.push_back(e);
        out.total += e.w;
        for (int t = 0; t < k; ++t) {
            if (in_tree[t]) continue;
            const double w = dist.d(order[pick], order[t]);
            if (w < best_w[t]) {
                best_w[t] = w;
                best_from[t] = order[pick];
            } else if (w == best_w[t]) {
                const auto cand = std::pair<int, int>(
                    std::min(order[pick], order[t]), std::max(order[pick], order[t]));
                const auto cur = std::pair<int, int>(
                    std::min(best_from[t], order[t]), std::max(best_from[t], order[t]));
                if (cand < cur) best_from[t] = order[pick];
            }
        }
    }
    return out;
}

} // namespace varlearn
