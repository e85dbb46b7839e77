// End-to-end acceptance checks. Each check prints exactly one line,
// [PASS]/[FAIL] plus wall time, and the process exits with the number of
// failures. The final check needs an external data file and reports [SKIP]
// when the file is not present.

#include <varlearn/dimension.hpp>
#include <varlearn/equations.hpp>
#include <varlearn/pointcloud.hpp>
#include <varlearn/polynomial.hpp>
#include <varlearn/csv.hpp>
#include <varlearn/rng.hpp>
#include <varlearn/samplers.hpp>
#include <varlearn/topology.hpp>
#include <varlearn/varietygeom.hpp>
#include <varlearn/volume.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace varlearn;

namespace {

void expect(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

std::string num(double v) { return detail::format_double(v); }

PointCloud circle_cloud(int m) {
    Eigen::MatrixXd pts(m, 2);
    for (int k = 0; k < m; ++k) {
        const double t = 2.0 * M_PI * k / m;
        pts(k, 0) = std::cos(t);
        pts(k, 1) = std::sin(t);
    }
    return PointCloud{pts, Ambient::Euclidean};
}

Polynomial trott_quartic() {
    return Polynomial::parse(
        "144*x1^4 + 144*x2^4 + 350*x1^2*x2^2 - 225*x1^2 - 225*x2^2 + 81", 2);
}

// Rank-2 catalecticant structure: antidiagonal values of the 4x4 Hankel
// matrix built from two cubic outer products, with the central antidiagonal
// deleted and the rest emitted in a scrambled but fixed order.
PointCloud hankel_projection_sample(int m, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd pts(m, 6);
    for (int k = 0; k < m; ++k) {
        const double s1 = rng.uniform(-1.0, 1.0);
        const double t1 = rng.uniform(-1.0, 1.0);
        const double s2 = rng.uniform(-1.0, 1.0);
        const double t2 = rng.uniform(-1.0, 1.0);
        double h[7];
        for (int i = 0; i < 7; ++i)
            h[i] = detail::pow_int(s1, 6 - i) * detail::pow_int(t1, i) +
                   detail::pow_int(s2, 6 - i) * detail::pow_int(t2, i);
        pts(k, 0) = h[2];
        pts(k, 1) = h[6];
        pts(k, 2) = h[1];
        pts(k, 3) = h[5];
        pts(k, 4) = h[0];
        pts(k, 5) = h[4];
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

// Finite bar lengths, longest first. Bars still open at the cutoff have no
// measured length and are left out.
std::vector<double> bar_lengths(const std::vector<PersistenceInterval>& bars) {
    std::vector<double> out;
    for (const auto& b : bars)
        if (!std::isinf(b.death)) out.push_back(b.death - b.birth);
    std::sort(out.rbegin(), out.rend());
    return out;
}

// --- the checks, in a fixed order ---------------------------------------

void check_rotation_equation_counts(const PointCloud& so3) {
    const int expected[] = {0, 20, 136, 550};
    for (int degree = 1; degree <= 4; ++degree) {
        const EquationSet eq = find_equations(so3, degree, false,
                                              KernelMethod::SVD,
                                              ToleranceRule::gap());
        const int got = static_cast<int>(eq.polynomials.size());
        expect(got == expected[degree - 1],
               "degree " + std::to_string(degree) + " found " +
                   std::to_string(got) + " equations, wanted " +
                   std::to_string(expected[degree - 1]));
    }
}

void check_segre_minors() {
    const PointCloud cloud = sample_low_rank(200, 2, 3, 1, 2);
    const EquationSet eq = find_equations(cloud, 2, true, KernelMethod::RREF,
                                          ToleranceRule::machine());
    expect(eq.polynomials.size() == 3,
           "found " + std::to_string(eq.polynomials.size()) +
               " quadrics, wanted 3");

    const std::vector<std::pair<Polynomial, Polynomial>> minors = {
        {Polynomial::parse("x1*x5 - x2*x4", 6),
         Polynomial::parse("x2*x4 - x1*x5", 6)},
        {Polynomial::parse("x1*x6 - x3*x4", 6),
         Polynomial::parse("x3*x4 - x1*x6", 6)},
        {Polynomial::parse("x2*x6 - x3*x5", 6),
         Polynomial::parse("x3*x5 - x2*x6", 6)},
    };
    std::vector<int> hits(3, 0);
    for (const auto& p : eq.polynomials) {
        const Polynomial q = p.rounded(0).normalized();
        bool matched = false;
        for (std::size_t i = 0; i < minors.size(); ++i)
            if (q == minors[i].first || q == minors[i].second) {
                ++hits[i];
                matched = true;
            }
        expect(matched, "unexpected quadric " + q.to_string());
    }
    for (int h : hits) expect(h == 1, "a minor was matched " +
                                          std::to_string(h) + " times");
}

void check_hankel_kernel_dimension() {
    const PointCloud cloud = hankel_projection_sample(500, 3);
    const EquationSet eq = find_equations(cloud, 4, false, KernelMethod::SVD,
                                          ToleranceRule::machine());
    expect(eq.polynomials.size() == 2,
           "kernel dimension " + std::to_string(eq.polynomials.size()) +
               ", wanted 2");
}

void check_sample_size_bound() {
    const long long got = nsw_bound(NswParameters{4, 1.0, 1000.0, 0.1});
    expect(std::llabs(got - 1592570365LL) <= 2,
           "bound " + std::to_string(got) + " not within 2 of 1592570365");
}

void check_quartic_curve_volume() {
    Rng rng(5);
    const SliceEstimate est =
        real_degree_hypersurface(trott_quartic().homogenized(), 20000, rng);
    expect(est.deg_r >= 1.83 && est.deg_r <= 1.93,
           "real degree " + num(est.deg_r) + " outside [1.83, 1.93]");
    expect(est.volume >= 5.75 && est.volume <= 6.09,
           "length " + num(est.volume) + " outside [5.75, 6.09]");
}

void check_conic_real_degree() {
    Rng rng(6);
    const Polynomial conic = Polynomial::parse("x1^2 + x2^2 - x3^2", 3);
    const SliceEstimate est = real_degree_hypersurface(conic, 100000, rng);
    expect(est.deg_r >= 1.384 && est.deg_r <= 1.444,
           "real degree " + num(est.deg_r) + " outside [1.384, 1.444]");
}

void check_circle_reach() {
    const PointCloud cloud = circle_cloud(100);
    const std::vector<Polynomial> F = {
        Polynomial::parse("x1^2 + x2^2 - 1", 2)};
    const double reach = empirical_reach(cloud, F);
    expect(std::abs(reach - 1.0) <= 1e-8,
           "reach " + num(reach) + " not within 1e-8 of 1");
}

void check_barcodes_against_oracle() {
    const double scales[] = {0.3, 0.45, 0.7, 1.0};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng pick(seed + 100);
        const int m = 2 + static_cast<int>(pick.raw() % 7);
        const int n = 1 + static_cast<int>(seed % 3);
        const int max_dim = static_cast<int>(seed % 3);
        const double max_scale = scales[seed % 4];

        Rng rng(seed + 500);
        Eigen::MatrixXd pts(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) pts(i, j) = rng.uniform01();
        const auto dist = distance_matrix(PointCloud{pts, Ambient::Euclidean});

        const auto mine = vietoris_rips_barcode(dist, max_dim, max_scale);
        const auto ref = oracle::brute_force_barcode(dist.d, max_dim, max_scale);
        for (int p = 0; p <= max_dim; ++p) {
            auto want = ref.dims[p];
            std::sort(want.begin(), want.end());
            expect(sorted_pairs(mine.dims[p]) == want,
                   "cloud seed " + std::to_string(seed) + " differs in H" +
                       std::to_string(p));
        }
    }
}

void check_square_loop_interval() {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 1, 0, 1, 1, 0, 1;
    const auto dist = distance_matrix(PointCloud{pts, Ambient::Euclidean});
    const Barcode bars = vietoris_rips_barcode(dist, 1, 1.0);
    expect(bars.dims[1].size() == 1,
           std::to_string(bars.dims[1].size()) + " loop intervals, wanted 1");
    const double birth = bars.dims[1][0].birth;
    const double death = bars.dims[1][0].death;
    expect(std::abs(birth - 0.35355339059327373) <= 1e-6,
           "loop born at " + num(birth));
    expect(std::abs(death - 0.5) <= 1e-6, "loop dies at " + num(death));
}

void check_quartic_curve_loops() {
    const PointCloud cloud = sample_trott(300, 10);
    // The target numbers (cutoff 0.3, length threshold 0.05) are stated in
    // scaled-distance units; the filtration parameter is half the scaled
    // distance, so both are converted by the same factor.
    const double max_scale = 0.3 / 2.0;
    const double min_length = 0.05 / 2.0;
    const auto dist = distance_matrix(cloud);
    const Barcode plain = vietoris_rips_barcode(dist, 1, max_scale);

    const auto plain_lengths = bar_lengths(plain.dims[1]);
    int plain_long = 0;
    for (double len : plain_lengths)
        if (len > min_length) ++plain_long;
    expect(plain_long == 4, std::to_string(plain_long) +
                                " loops longer than the threshold, wanted 4");

    const EquationSet eq = find_equations(cloud, 4, false, KernelMethod::SVD,
                                          ToleranceRule::gap());
    expect(eq.polynomials.size() == 1,
           "quartic search found " + std::to_string(eq.polynomials.size()) +
               " equations, wanted 1");

    const auto edist = ellipsoid_distance_matrix(cloud, eq.polynomials, 0.01);
    const Barcode ell = vietoris_rips_barcode(edist, 1, max_scale);
    const auto ell_lengths = bar_lengths(ell.dims[1]);
    int ell_long = 0;
    for (double len : ell_lengths)
        if (len > min_length) ++ell_long;
    expect(ell_long == 4,
           std::to_string(ell_long) +
               " reweighted loops longer than the threshold, wanted 4");
    for (int i = 0; i < 4; ++i)
        expect(ell_lengths[i] >= plain_lengths[i] - 1e-12,
               "loop " + std::to_string(i) + " shrank from " +
                   num(plain_lengths[i]) + " to " + num(ell_lengths[i]));
}

void check_angle_variance_coefficients() {
    double prev = 0.0;
    for (int d = 1; d <= 10; ++d) {
        const double mine = anova_beta(d);
        const double ref = oracle::angle_variance_on_sphere(d);
        expect(std::abs(mine - ref) < 1e-6,
               "d=" + std::to_string(d) + " differs from quadrature by " +
                   num(std::abs(mine - ref)));
        if (d > 1)
            expect(mine < prev, "coefficient not decreasing at d=" +
                                    std::to_string(d));
        prev = mine;
    }
}

void check_rotation_dimension_band(const PointCloud& so3) {
    const DimensionDiagram dg = dimension_diagram(
        so3, {"CorrSum", "MLE", "ANOVA"}, 25, 12);
    for (const auto& [name, curve] : dg.curves)
        for (std::size_t i = 0; i < dg.grid.size(); ++i) {
            if (dg.grid[i] < 0.3 || dg.grid[i] > 0.5) continue;
            expect(curve[i].has_value(), name + " has no estimate at scale " +
                                             num(dg.grid[i]));
            expect(*curve[i] >= 2.0 && *curve[i] <= 4.5,
                   name + " = " + num(*curve[i]) + " at scale " +
                       num(dg.grid[i]) + ", outside [2.0, 4.5]");
        }
}

void check_unit_shrink_reduction() {
    const PointCloud cloud = circle_cloud(30);
    const std::vector<Polynomial> F = {
        Polynomial::parse("x1^2 + x2^2 - 1", 2)};
    const auto plain = distance_matrix(cloud);
    const auto ell = ellipsoid_distance_matrix(cloud, F, 1.0);
    const double delta = (plain.d - ell.d).cwiseAbs().maxCoeff();
    expect(delta <= 1e-12, "metrics differ by " + num(delta));
}

void check_toric_log_rank() {
    Eigen::MatrixXi A(4, 6);
    A << 1, 1, 1, 0, 0, 0,
         1, 0, 0, 1, 1, 0,
         0, 1, 0, 1, 0, 1,
         0, 0, 1, 0, 1, 1;
    const PointCloud cloud = sample_toric(A, 40, 14);
    Eigen::MatrixXd logs(cloud.m(), cloud.n());
    for (int i = 0; i < cloud.m(); ++i)
        for (int j = 0; j < cloud.n(); ++j)
            logs(i, j) = std::log(cloud.points(i, j));
    logs.rowwise() -= logs.colwise().mean().eval();
    const auto sigma = detail::compute_singular_values(logs);
    const int rank =
        numerical_rank(sigma, ToleranceRule::machine(), cloud.m(), cloud.n())
            .rank;
    expect(rank == 4, "log-PCA rank " + std::to_string(rank) + ", wanted 4");
}

// --- optional data-file suite --------------------------------------------

// Every conformation gets its own rigid motion, so coordinate normal forms
// are destroyed while pairwise atom distances survive.
PointCloud randomly_moved(const PointCloud& cloud, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd out(cloud.m(), 24);
    for (int k = 0; k < cloud.m(); ++k) {
        Eigen::Matrix3d g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = rng.gaussian();
        const Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
        Eigen::Matrix3d q = qr.householderQ();
        const Eigen::Matrix3d r = qr.matrixQR();
        for (int j = 0; j < 3; ++j)
            if (r(j, j) < 0.0) q.col(j) = -q.col(j);
        if (q.determinant() < 0.0) q.col(2) = -q.col(2);
        Eigen::Vector3d t;
        for (int i = 0; i < 3; ++i) t(i) = rng.gaussian();
        for (int atom = 0; atom < 8; ++atom) {
            const Eigen::Vector3d z =
                cloud.points.row(k).segment<3>(3 * atom).transpose();
            out.row(k).segment<3>(3 * atom) = (q * z + t).transpose();
        }
    }
    return PointCloud{out, Ambient::Euclidean};
}

void check_ring_conformation_file(const std::string& path) {
    PointCloud cloud = read_csv(path);
    if (cloud.n() != 24 && cloud.m() == 24) cloud = read_csv(path, true);
    expect(cloud.n() == 24, "expected 24 coordinates per conformation, got " +
                                std::to_string(cloud.n()));
    expect(cloud.m() >= 100, "expected at least 100 conformations");

    // Six independent linear relations at the documented tolerance.
    const EquationSet lin = find_equations(cloud, 1, false, KernelMethod::QR,
                                           ToleranceRule::fixed(1e-1));
    expect(lin.polynomials.size() == 6,
           std::to_string(lin.polynomials.size()) +
               " linear relations, wanted 6");

    // The three coordinate-sum relations hold directly on the data and lie
    // in the span of the six linear forms.
    double worst_sum = 0.0;
    for (int k = 0; k < cloud.m(); ++k) {
        const Eigen::Vector3d sums =
            cyclooctane_centering(cloud.points.row(k).transpose());
        worst_sum = std::max(worst_sum, sums.cwiseAbs().maxCoeff());
    }
    expect(worst_sum <= 0.05,
           "coordinate sums reach " + num(worst_sum) + ", wanted <= 0.05");

    Eigen::MatrixXd span(25, 6);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(24);
    for (int c = 0; c < 6; ++c) {
        const Polynomial& p = lin.polynomials[c];
        span(0, c) = p.evaluate(zero);
        for (int j = 0; j < 24; ++j) {
            Eigen::VectorXd unit = zero;
            unit(j) = 1.0;
            span(j + 1, c) = p.evaluate(unit) - span(0, c);
        }
    }
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::VectorXd target = Eigen::VectorXd::Zero(25);
        for (int atom = 0; atom < 8; ++atom) target(1 + 3 * atom + axis) = 1.0;
        const Eigen::VectorXd w = span.colPivHouseholderQr().solve(target);
        const double residual = (span * w - target).norm() / target.norm();
        expect(residual <= 1e-2, "axis " + std::to_string(axis) +
                                     " sum misses the span by " +
                                     num(residual));
    }

    // Bond and one-apart distances are constant across the ring; their
    // squared ratio is 8/3 by the fixed bond angle.
    double bond_mean = 0.0, skip_mean = 0.0, worst_bond = 0.0;
    for (int k = 0; k < cloud.m(); ++k) {
        const RingDistances rd =
            cyclooctane_ring_distances(cloud.points.row(k).transpose());
        for (int i = 0; i < 8; ++i) {
            bond_mean += rd.bond[i];
            skip_mean += rd.skip[i];
        }
    }
    bond_mean /= 8.0 * cloud.m();
    skip_mean /= 8.0 * cloud.m();
    for (int k = 0; k < cloud.m(); ++k) {
        const RingDistances rd =
            cyclooctane_ring_distances(cloud.points.row(k).transpose());
        for (int i = 0; i < 8; ++i)
            worst_bond = std::max(worst_bond,
                                  std::abs(rd.bond[i] - bond_mean) / bond_mean);
    }
    expect(bond_mean >= 2.0 && bond_mean <= 2.4,
           "squared bond length " + num(bond_mean) + " outside [2.0, 2.4]");
    expect(std::abs(skip_mean / bond_mean - 8.0 / 3.0) <= 0.01 * (8.0 / 3.0),
           "skip/bond ratio " + num(skip_mean / bond_mean) +
               " not within 1% of 8/3");
    expect(worst_bond <= 0.05,
           "bond relation residual " + num(worst_bond) + " above 5%");

    // After independent rigid motions the coordinate relations disappear and
    // the sixteen distance quadrics become visible at the same tolerance.
    const PointCloud moved = randomly_moved(cloud, 77);
    const EquationSet moved_lin = find_equations(
        moved, 1, false, KernelMethod::SVD, ToleranceRule::fixed(1e-1));
    expect(moved_lin.polynomials.empty(),
           std::to_string(moved_lin.polynomials.size()) +
               " linear relations survived the motions, wanted 0");
    const EquationSet moved_quad = find_equations(
        moved, 2, false, KernelMethod::SVD, ToleranceRule::fixed(1e-1));
    expect(moved_quad.polynomials.size() == 16,
           std::to_string(moved_quad.polynomials.size()) +
               " quadrics after the motions, wanted 16");
}

} // namespace

int main() {
    int failures = 0;
    const auto run = [&failures](const char* name, auto&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        try {
            body();
        } catch (const std::exception& e) {
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        if (detail.empty()) {
            std::printf("[PASS] %s (%.1f s)\n", name, secs);
        } else {
            std::printf("[FAIL] %s (%.1f s): %s\n", name, secs,
                        detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    };

    const PointCloud so3 = sample_so3(900, 1);

    run("rotation sample admits 0/20/136/550 equations at degrees 1-4",
        [&] { check_rotation_equation_counts(so3); });
    run("rank-one 2x3 sample recovers the three 2x2 minors exactly",
        check_segre_minors);
    run("projected hankel sample has a two-dimensional quartic kernel",
        check_hankel_kernel_dimension);
    run("homotopy sample-size bound equals 1592570365 for d=4",
        check_sample_size_bound);
    run("plane quartic real degree and length from 20000 random slices",
        check_quartic_curve_volume);
    run("conic real degree approaches sqrt(2) over 100000 slices",
        check_conic_real_degree);
    run("empirical reach of the exact unit circle is one",
        check_circle_reach);
    run("barcodes equal the brute-force oracle on 200 random clouds",
        check_barcodes_against_oracle);
    run("unit square yields the single loop interval [0.35355, 0.5]",
        check_square_loop_interval);
    run("plane quartic shows four loops that persist longer reweighted",
        check_quartic_curve_loops);
    run("angle variance coefficients match quadrature and decrease",
        check_angle_variance_coefficients);
    run("rotation sample dimension estimates stay in [2, 4.5] mid-scale",
        [&] { check_rotation_dimension_band(so3); });
    run("unit-shrink reweighted metric equals the scaled euclidean one",
        check_unit_shrink_reduction);
    run("toric octahedron sample has log-PCA rank four",
        check_toric_log_rank);

    const char* env = std::getenv("VARLEARN_CYCLOOCTANE");
    const std::string ring_path = env ? env : "data/cyclooctane.csv";
    if (std::ifstream(ring_path).good()) {
        run("ring conformation file shows the linear and quadric relations",
            [&] { check_ring_conformation_file(ring_path); });
    } else {
        std::printf(
            "[SKIP] ring conformation file checks (no file at %s; set "
            "VARLEARN_CYCLOOCTANE to point at the 6040x24 CSV)\n",
            ring_path.c_str());
    }

    if (failures > 0)
        std::printf("%d check(s) failed\n", failures);
    return failures;
}
