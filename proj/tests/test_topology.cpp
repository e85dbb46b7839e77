#include <catch2/catch_amalgamated.hpp>

#include <varlearn/pointcloud.hpp>
#include <varlearn/polynomial.hpp>
#include <varlearn/rng.hpp>
#include <varlearn/topology.hpp>
#include <varlearn/varietygeom.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

using namespace varlearn;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PointCloud random_cloud(int m, int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd pts(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) pts(i, j) = rng.uniform01();
    return PointCloud{pts, Ambient::Euclidean};
}

PointCloud circle_cloud(int m) {
    Eigen::MatrixXd pts(m, 2);
    for (int k = 0; k < m; ++k) {
        const double t = 2.0 * M_PI * k / m;
        pts(k, 0) = std::cos(t);
        pts(k, 1) = std::sin(t);
    }
    return PointCloud{pts, Ambient::Euclidean};
}

std::vector<std::pair<double, double>> sorted_pairs(
    const std::vector<PersistenceInterval>& bars) {
    std::vector<std::pair<double, double>> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.emplace_back(b.birth, b.death);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("barcodes match the brute force oracle on small clouds") {
    const double scales[] = {0.3, 0.45, 0.7, 1.0};
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng pick(seed + 100);
        const int m = 2 + static_cast<int>(pick.raw() % 7);
        const int n = 1 + static_cast<int>(seed % 3);
        const int max_dim = static_cast<int>(seed % 3);
        const double max_scale = scales[seed % 4];
        const auto cloud = random_cloud(m, n, seed + 500);
        const auto dist = distance_matrix(cloud);

        const auto mine = vietoris_rips_barcode(dist, max_dim, max_scale);
        const auto ref = oracle::brute_force_barcode(dist.d, max_dim, max_scale);

        REQUIRE(mine.dims.size() == static_cast<std::size_t>(max_dim) + 1);
        for (int p = 0; p <= max_dim; ++p) {
            auto want = ref.dims[p];
            std::sort(want.begin(), want.end());
            REQUIRE(sorted_pairs(mine.dims[p]) == want);
            ++compared;
        }
    }
    REQUIRE(compared >= 30);
}

TEST_CASE("barcodes match the brute force oracle on projective clouds") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng(seed + 900);
        const int m = 4 + static_cast<int>(seed % 4);
        Eigen::MatrixXd pts(m, 3);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < 3; ++j) pts(i, j) = rng.gaussian();
        const PointCloud cloud{pts, Ambient::Projective};
        const auto dist = distance_matrix(cloud);
        const int max_dim = 1 + static_cast<int>(seed % 2);

        const auto mine = vietoris_rips_barcode(dist, max_dim, 1.0);
        const auto ref = oracle::brute_force_barcode(dist.d, max_dim, 1.0);
        for (int p = 0; p <= max_dim; ++p) {
            auto want = ref.dims[p];
            std::sort(want.begin(), want.end());
            REQUIRE(sorted_pairs(mine.dims[p]) == want);
        }
    }
}

TEST_CASE("square sample yields the textbook loop interval") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 1, 0, 1, 1, 0, 1;
    const PointCloud cloud{pts, Ambient::Euclidean};
    const auto dist = distance_matrix(cloud);
    const double half_side = 0.5 / std::sqrt(2.0);

    SECTION("full scale") {
        const auto bars = vietoris_rips_barcode(dist, 1, 1.0);
        REQUIRE(bars.dims.size() == 2);

        const auto h0 = sorted_pairs(bars.dims[0]);
        REQUIRE(h0.size() == 4);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(h0[i].first == 0.0);
            REQUIRE(h0[i].second == Approx(half_side).margin(1e-15));
        }
        REQUIRE(h0[3].first == 0.0);
        REQUIRE(h0[3].second == kInf);

        REQUIRE(bars.dims[1].size() == 1);
        REQUIRE(bars.dims[1][0].birth == Approx(0.35355339059327373).margin(1e-15));
        REQUIRE(bars.dims[1][0].death == Approx(0.5).margin(1e-15));
    }

    SECTION("truncated before the diagonals enter") {
        const auto bars = vietoris_rips_barcode(dist, 1, 0.4);
        REQUIRE(bars.dims[1].size() == 1);
        REQUIRE(bars.dims[1][0].birth == Approx(half_side).margin(1e-15));
        REQUIRE(std::isinf(bars.dims[1][0].death));
        // truncation reports the infinity token, never the cutoff itself
        for (const auto& bar : bars.dims[0])
            REQUIRE((std::isinf(bar.death) || bar.death < 0.4));
    }

    SECTION("degree zero only") {
        const auto bars = vietoris_rips_barcode(dist, 0, 1.0);
        REQUIRE(bars.dims.size() == 1);
        REQUIRE(bars.dims[0].size() == 4);
    }
}

TEST_CASE("component bars agree with single linkage and spanning trees") {
    const auto cloud = random_cloud(40, 2, 7);
    const auto dist = distance_matrix(cloud);
    const double max_scale = 0.3;

    const auto bars = vietoris_rips_barcode(dist, 0, max_scale);
    REQUIRE(bars.dims.size() == 1);
    REQUIRE(bars.dims[0].size() == 40);

    int infinite = 0;
    std::vector<double> deaths;
    for (const auto& bar : bars.dims[0]) {
        REQUIRE(bar.birth == 0.0);
        if (std::isinf(bar.death)) {
            ++infinite;
        } else {
            REQUIRE(bar.death <= max_scale);
            deaths.push_back(bar.death);
        }
    }

    // components at radius eps are single-linkage clusters at distance 2*eps
    const auto clusters = single_linkage_clusters(dist, 2.0 * max_scale);
    REQUIRE(infinite == clusters.count);

    // finite deaths are exactly the half spanning-tree edges inside clusters
    std::vector<double> tree_halves;
    for (const auto& members : clusters.members) {
        if (members.size() < 2) continue;
        for (const auto& e : minimum_spanning_tree(dist, members).edges)
            tree_halves.push_back(e.w / 2.0);
    }
    std::sort(deaths.begin(), deaths.end());
    std::sort(tree_halves.begin(), tree_halves.end());
    REQUIRE(deaths == tree_halves);
}

TEST_CASE("coincident points keep a zero length component bar") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 0, 0, 1, 0;
    const PointCloud cloud{pts, Ambient::Euclidean};
    const auto bars = vietoris_rips_barcode(distance_matrix(cloud), 1, 1.0);

    const auto h0 = sorted_pairs(bars.dims[0]);
    REQUIRE(h0.size() == 3);
    REQUIRE(h0[0] == std::pair<double, double>(0.0, 0.0));
    REQUIRE(h0[1] == std::pair<double, double>(0.0, 0.5));
    REQUIRE(h0[2].second == kInf);
    REQUIRE(bars.dims[1].empty());
}

TEST_CASE("ellipsoid weights at lambda one reproduce the plain barcode") {
    const auto cloud = circle_cloud(16);
    const std::vector<Polynomial> eqs = {Polynomial::parse("-1 + x1^2 + x2^2", 2)};

    const auto base = distance_matrix(cloud);
    const auto weighted = ellipsoid_distance_matrix(cloud, eqs, 1.0);
    REQUIRE(weighted.metric == Metric::EllipsoidWeighted);

    const auto a = vietoris_rips_barcode(base, 1, 1.0);
    const auto b = vietoris_rips_barcode(weighted, 1, 1.0);
    REQUIRE(a.dims.size() == b.dims.size());
    for (std::size_t p = 0; p < a.dims.size(); ++p)
        REQUIRE(sorted_pairs(a.dims[p]) == sorted_pairs(b.dims[p]));
    REQUIRE(a.dims[1].size() >= 1);
}

TEST_CASE("barcode is invariant under point relabeling") {
    const auto cloud = random_cloud(12, 3, 21);
    Eigen::MatrixXd shuffled(12, 3);
    for (int i = 0; i < 12; ++i) shuffled.row(i) = cloud.points.row(11 - i);
    shuffled.row(3).swap(shuffled.row(8));
    const PointCloud relabeled{shuffled, Ambient::Euclidean};

    const auto a = vietoris_rips_barcode(distance_matrix(cloud), 2, 0.5);
    const auto b = vietoris_rips_barcode(distance_matrix(relabeled), 2, 0.5);
    REQUIRE(a.dims.size() == b.dims.size());
    for (std::size_t p = 0; p < a.dims.size(); ++p)
        REQUIRE(sorted_pairs(a.dims[p]) == sorted_pairs(b.dims[p]));
}

TEST_CASE("flag filtration is sorted truncated and monotone") {
    const auto cloud = random_cloud(7, 2, 3);
    const auto dist = distance_matrix(cloud);

    const auto filt = flag_filtration(dist, 2, 0.4);
    REQUIRE(filt.max_dim == 2);
    REQUIRE(filt.max_scale == 0.4);

    int vertices = 0;
    std::map<std::vector<int>, std::size_t> position;
    for (std::size_t idx = 0; idx < filt.simplices.size(); ++idx) {
        const auto& [verts, value] = filt.simplices[idx];
        REQUIRE(!verts.empty());
        REQUIRE(verts.size() <= 4);
        REQUIRE(std::is_sorted(verts.begin(), verts.end()));
        REQUIRE(value <= 0.4);

        if (verts.size() == 1) {
            ++vertices;
            REQUIRE(value == 0.0);
        }

        // value is half the widest pairwise distance among the vertices
        double widest = 0.0;
        for (std::size_t a = 0; a < verts.size(); ++a)
            for (std::size_t b = a + 1; b < verts.size(); ++b)
                widest = std::max(widest, dist.d(verts[a], verts[b]) / 2.0);
        REQUIRE(value == widest);

        // every facet appears earlier
        if (verts.size() >= 2) {
            std::vector<int> facet;
            for (std::size_t drop = 0; drop < verts.size(); ++drop) {
                facet.clear();
                for (std::size_t a = 0; a < verts.size(); ++a)
                    if (a != drop) facet.push_back(verts[a]);
                REQUIRE(position.count(facet) == 1);
                REQUIRE(position.at(facet) < idx);
            }
        }

        // global order: value, then dimension, then vertex tuple
        if (idx > 0) {
            const auto& [pv, pval] = filt.simplices[idx - 1];
            const bool ordered =
                pval < value ||
                (pval == value && pv.size() < verts.size()) ||
                (pval == value && pv.size() == verts.size() && pv < verts);
            REQUIRE(ordered);
        }
        position[verts] = idx;
    }
    REQUIRE(vertices == 7);

    // the complex at a smaller scale is exactly the truncation of the larger one
    const auto tight = flag_filtration(dist, 2, 0.25);
    std::vector<std::pair<std::vector<int>, double>> expected;
    for (const auto& s : filt.simplices)
        if (s.second <= 0.25) expected.push_back(s);
    REQUIRE(tight.simplices == expected);
}

TEST_CASE("simplex cap stops flag complex explosions") {
    // 6 points, everything within scale 1: 6 + 15 + 20 + 15 = 56 simplices
    const auto cloud = random_cloud(6, 2, 11);
    const auto dist = distance_matrix(cloud);

    REQUIRE_NOTHROW(vietoris_rips_barcode(dist, 2, 1.0, 56));
    REQUIRE_THROWS_AS(vietoris_rips_barcode(dist, 2, 1.0, 55), capacity_error);
    REQUIRE_THROWS_AS(flag_filtration(dist, 2, 1.0, 40), capacity_error);

    try {
        vietoris_rips_barcode(dist, 2, 1.0, 40);
        FAIL("expected a capacity error");
    } catch (const capacity_error& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("cap") != std::string::npos);
        REQUIRE(msg.find("40") != std::string::npos);
    }
}

TEST_CASE("barcode input validation") {
    const auto dist = distance_matrix(random_cloud(3, 2, 1));
    REQUIRE_THROWS_AS(vietoris_rips_barcode(dist, -1, 0.5), invalid_input);
    REQUIRE_THROWS_AS(vietoris_rips_barcode(dist, 1, 0.0), invalid_input);
    REQUIRE_THROWS_AS(vietoris_rips_barcode(dist, 1, -0.1), invalid_input);
    REQUIRE_THROWS_AS(vietoris_rips_barcode(dist, 1, 1.5), invalid_input);

    DistanceMatrix empty;
    REQUIRE_THROWS_AS(vietoris_rips_barcode(empty, 1, 1.0), invalid_input);

    // one lonely point is fine: a single immortal component
    DistanceMatrix lone;
    lone.d = Eigen::MatrixXd::Zero(1, 1);
    const auto bars = vietoris_rips_barcode(lone, 1, 1.0);
    REQUIRE(bars.dims.size() == 2);
    REQUIRE(bars.dims[0].size() == 1);
    REQUIRE(bars.dims[0][0].birth == 0.0);
    REQUIRE(std::isinf(bars.dims[0][0].death));
    REQUIRE(bars.dims[1].empty());
}

TEST_CASE("sample size bound reproduces the published constants") {
    const long long big = nsw_bound({4, 1.0, 1000.0, 0.1});
    REQUIRE(std::llabs(big - 1592570365LL) <= 2);
    REQUIRE(nsw_bound({1, 4.0, 4.0, 0.5}) == 72);
    REQUIRE(nsw_bound({2, 0.5, 3.0, 0.25}) == 35072);
}

TEST_CASE("sample size bound scales with the volume") {
    REQUIRE(nsw_bound({3, 2.0, 5.0, 0.2}) == 31891);
    REQUIRE(nsw_bound({3, 2.0, 15.0, 0.2}) == 104109);

    long long prev = 0;
    for (double nu : {1.0, 2.0, 4.0, 8.0}) {
        const long long b = nsw_bound({2, 1.0, nu, 0.5});
        REQUIRE(b > prev);
        prev = b;
    }
}

TEST_CASE("sample size bound warns outside the proven dimension range") {
    bool warn = true;
    REQUIRE(nsw_bound({17, 2.0, 1.0, 0.5}, &warn) > 0);
    REQUIRE_FALSE(warn);

    warn = false;
    REQUIRE(nsw_bound({18, 1.0, 1e-6, 0.5}, &warn) > 0);
    REQUIRE(warn);
}

TEST_CASE("sample size bound rejects bad parameters and overflow") {
    REQUIRE_THROWS_AS(nsw_bound({0, 1.0, 1.0, 0.5}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({-2, 1.0, 1.0, 0.5}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({2, 0.0, 1.0, 0.5}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({2, -1.0, 1.0, 0.5}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({2, 1.0, 0.0, 0.5}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({2, 1.0, 1.0, 0.0}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({2, 1.0, 1.0, 1.0}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({2, 1.0, 1.0, 1.2}), invalid_input);
    REQUIRE_THROWS_AS(nsw_bound({17, 1e-6, 1e30, 0.1}), capacity_error);
}
