// Command-line front end: sampling, dimension diagrams, equation search,
// tangent spaces, reach, barcodes, and volume estimates over CSV and
// polynomial text inputs, with JSON (+ optional SVG) outputs and a manifest
// next to every result file.

#include <CLI11.hpp>

#include <varlearn/csv.hpp>
#include <varlearn/dimension.hpp>
#include <varlearn/parallel.hpp>
#include <varlearn/equations.hpp>
#include <varlearn/pointcloud.hpp>
#include <varlearn/polynomial.hpp>
#include <varlearn/samplers.hpp>
#include <varlearn/serialize.hpp>
#include <varlearn/svg.hpp>
#include <varlearn/topology.hpp>
#include <varlearn/varietygeom.hpp>
#include <varlearn/volume.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

namespace {

using namespace varlearn;

void report(const char* kind, const std::string& message) {
    std::string line = message;
    for (char& c : line)
        if (c == '\n') c = ';';
    std::fprintf(stderr, "error: %s: %s\n", kind, line.c_str());
}

std::string svg_path_for(const std::string& json_path) {
    const std::string suffix = ".json";
    if (json_path.size() > suffix.size() &&
        json_path.compare(json_path.size() - suffix.size(), suffix.size(),
                          suffix) == 0)
        return json_path.substr(0, json_path.size() - suffix.size()) + ".svg";
    return json_path + ".svg";
}

// Manifest written next to the first output; wall time is the only field
// allowed to differ between identical runs.
struct ManifestClock {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();

    void emit(const std::string& command, nlohmann::json config,
              std::uint64_t seed, std::vector<std::string> inputs,
              std::vector<std::string> outputs) const {
        RunManifest mf;
        mf.command = command;
        mf.config = std::move(config);
        mf.seed = seed;
        mf.inputs = std::move(inputs);
        mf.outputs = std::move(outputs);
        mf.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        write_json(mf.outputs.front() + ".manifest.json", manifest_to_json(mf));
    }
};

PointCloud load_cloud(const std::string& path, bool columns_are_points,
                      bool projective) {
    PointCloud cloud = read_csv(path, columns_are_points);
    cloud.ambient = projective ? Ambient::Projective : Ambient::Euclidean;
    return cloud;
}

Eigen::MatrixXi load_integer_matrix(const std::string& path) {
    const PointCloud raw = read_csv(path);
    Eigen::MatrixXi A(raw.m(), raw.n());
    for (int i = 0; i < raw.m(); ++i)
        for (int j = 0; j < raw.n(); ++j) {
            const double v = raw.points(i, j);
            if (v != std::round(v))
                throw invalid_input("exponent matrix entries must be integers");
            A(i, j) = static_cast<int>(v);
        }
    return A;
}

ToleranceRule resolve_rule(const std::string& name, double gap_decades,
                           double tau, bool tau_given) {
    if (name == "machine") return ToleranceRule::machine();
    if (name == "gap") return ToleranceRule::gap(gap_decades);
    if (name == "fixed") {
        if (!tau_given)
            throw invalid_input("--rule fixed requires --tau");
        return ToleranceRule::fixed(tau);
    }
    throw invalid_input("unknown tolerance rule '" + name + "'");
}

KernelMethod resolve_method(const std::string& name) {
    if (name == "svd") return KernelMethod::SVD;
    if (name == "qr") return KernelMethod::QR;
    if (name == "rref") return KernelMethod::RREF;
    throw invalid_input("unknown kernel method '" + name + "'");
}

long long simplex_cap_from_env() {
    const char* env = std::getenv("VARLEARN_SIMPLEX_CAP");
    if (env == nullptr) return default_simplex_cap;
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw invalid_input("VARLEARN_SIMPLEX_CAP must be a positive integer");
    return v;
}

struct SampleArgs {
    std::string variety;
    int m = 0;
    std::uint64_t seed = 0;
    std::string output;
    int p = 0, q = 0, r = 0;
    bool p_set = false, q_set = false, r_set = false;
    std::string matrix_path;
    int noise_round = 0;
    bool noise_round_set = false;
    double noise_sigma = 0.0;
    bool noise_sigma_set = false;
    std::uint64_t noise_seed = 0;
    bool noise_seed_set = false;
};

void run_sample(const SampleArgs& a) {
    const ManifestClock clock;
    std::vector<std::string> inputs;

    PointCloud cloud;
    if (a.variety == "trott") {
        cloud = sample_trott(a.m, a.seed);
    } else if (a.variety == "so3") {
        cloud = sample_so3(a.m, a.seed);
    } else if (a.variety == "lowrank" || a.variety == "segre") {
        if (!a.p_set || !a.q_set)
            throw invalid_input(a.variety + " needs --p and --q");
        int r = a.r;
        if (a.variety == "segre") {
            if (a.r_set)
                throw invalid_input("segre fixes --r 1; use lowrank instead");
            r = 1;
        } else if (!a.r_set) {
            throw invalid_input("lowrank needs --r");
        }
        cloud = sample_low_rank(a.m, a.p, a.q, r, a.seed);
    } else if (a.variety == "toric") {
        if (a.matrix_path.empty())
            throw invalid_input("toric needs --matrix with the exponent matrix");
        inputs.push_back(a.matrix_path);
        cloud = sample_toric(load_integer_matrix(a.matrix_path), a.m, a.seed);
    } else {
        throw invalid_input("unknown variety '" + a.variety + "'");
    }
    if (a.variety != "toric" && !a.matrix_path.empty())
        throw invalid_input("--matrix is only used by the toric sampler");
    if (a.variety != "lowrank" && a.variety != "segre" &&
        (a.p_set || a.q_set || a.r_set))
        throw invalid_input("--p/--q/--r are only used by matrix samplers");

    Noise noise = Noise::none();
    if (a.noise_round_set) noise = Noise::round_digits(a.noise_round);
    if (a.noise_sigma_set) noise = Noise::gaussian(a.noise_sigma);
    const std::uint64_t noise_seed =
        a.noise_seed_set ? a.noise_seed : a.seed + 1;
    cloud = perturb(cloud, noise, noise_seed);

    write_csv(a.output, cloud.points);

    nlohmann::json config{{"variety", a.variety},
                          {"m", a.m},
                          {"output", a.output}};
    if (a.p_set) config["p"] = a.p;
    if (a.q_set) config["q"] = a.q;
    if (a.r_set) config["r"] = a.r;
    if (!a.matrix_path.empty()) config["matrix"] = a.matrix_path;
    if (a.noise_round_set) config["noise_round"] = a.noise_round;
    if (a.noise_sigma_set) {
        config["noise_sigma"] = a.noise_sigma;
        config["noise_seed"] = noise_seed;
    }
    clock.emit("sample", std::move(config), a.seed, std::move(inputs),
               {a.output});
    std::printf("wrote %s (%d points in R^%d)\n", a.output.c_str(), cloud.m(),
                cloud.n());
}

struct DimdiagArgs {
    std::string input;
    bool columns_are_points = false;
    bool projective = false;
    int grid = 25;
    std::vector<std::string> estimators{"NPCA", "BoxCounting", "PHCurve",
                                        "CorrSum", "MLE", "ANOVA"};
    std::uint64_t seed = 0;
    std::string output = "dimdiag.json";
    bool svg = false;
    std::string band = "0.2:0.8";
};

std::pair<double, double> parse_band(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw invalid_input("--band must look like lo:hi");
    char* end = nullptr;
    const double lo = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + colon)
        throw invalid_input("--band must look like lo:hi");
    const double hi = std::strtod(text.c_str() + colon + 1, &end);
    if (*end != '\0' || !(0.0 <= lo) || !(lo <= hi) || !(hi <= 1.0))
        throw invalid_input("--band needs 0 <= lo <= hi <= 1");
    return {lo, hi};
}

void run_dimdiag(const DimdiagArgs& a) {
    const ManifestClock clock;
    const auto [lo, hi] = parse_band(a.band);
    const PointCloud cloud =
        load_cloud(a.input, a.columns_are_points, a.projective);
    const DimensionDiagram dg =
        dimension_diagram(cloud, a.estimators, a.grid, a.seed);

    write_json(a.output, diagram_to_json(dg));
    std::vector<std::string> outputs{a.output};
    if (a.svg) {
        const std::string path = svg_path_for(a.output);
        std::ofstream out(path);
        if (!out) throw parse_error("cannot write '" + path + "'");
        out << diagram_svg(dg, cloud.n());
        outputs.push_back(path);
    }

    // Per-estimator medians over the band, a one-number summary of each curve.
    for (const auto& [name, curve] : dg.curves) {
        std::vector<double> values;
        for (std::size_t i = 0; i < curve.size(); ++i)
            if (curve[i] && dg.grid[i] >= lo && dg.grid[i] <= hi)
                values.push_back(*curve[i]);
        if (values.empty()) {
            std::printf("median %s n/a\n", name.c_str());
            continue;
        }
        std::sort(values.begin(), values.end());
        const std::size_t mid = values.size() / 2;
        const double median = values.size() % 2 == 1
                                  ? values[mid]
                                  : 0.5 * (values[mid - 1] + values[mid]);
        std::printf("median %s %s\n", name.c_str(),
                    detail::format_double(median).c_str());
    }

    clock.emit("dimdiag",
               {{"input", a.input},
                {"grid", a.grid},
                {"estimators", a.estimators},
                {"band", a.band},
                {"columns_are_points", a.columns_are_points},
                {"projective", a.projective},
                {"output", a.output},
                {"svg", a.svg}},
               a.seed, {a.input}, std::move(outputs));
}

struct EquationsArgs {
    std::string input;
    bool columns_are_points = false;
    bool projective = false;
    int degree = 0;
    bool homogeneous = false;
    std::string method = "svd";
    std::string rule = "machine";
    double gap_decades = 2.0;
    double tau = 0.0;
    bool tau_set = false;
    std::string output = "equations.json";
    std::string text_path;
    std::string sv_path;
};

void run_equations(const EquationsArgs& a) {
    const ManifestClock clock;
    const PointCloud cloud =
        load_cloud(a.input, a.columns_are_points, a.projective);
    const EquationSet eq =
        find_equations(cloud, a.degree, a.homogeneous, resolve_method(a.method),
                       resolve_rule(a.rule, a.gap_decades, a.tau, a.tau_set));

    nlohmann::json polys = nlohmann::json::array();
    for (const auto& p : eq.polynomials) polys.push_back(polynomial_to_json(p));
    write_json(a.output,
               nlohmann::json{{"count", eq.polynomials.size()},
                              {"rank", eq.rank},
                              {"tau", eq.tau},
                              {"polynomials", std::move(polys)}});
    std::vector<std::string> outputs{a.output};

    if (!a.text_path.empty()) {
        write_polynomials(a.text_path, eq.polynomials);
        outputs.push_back(a.text_path);
    }
    if (!a.sv_path.empty()) {
        std::ofstream out(a.sv_path);
        if (!out) throw parse_error("cannot write '" + a.sv_path + "'");
        out << "index,log10_sigma\n";
        for (std::size_t i = 0; i < eq.sigma.size(); ++i)
            out << i << ','
                << (eq.sigma[i] > 0.0
                        ? detail::format_double(std::log10(eq.sigma[i]))
                        : "-inf")
                << '\n';
        outputs.push_back(a.sv_path);
    }

    clock.emit("equations",
               {{"input", a.input},
                {"degree", a.degree},
                {"homogeneous", a.homogeneous},
                {"method", a.method},
                {"rule", a.rule},
                {"columns_are_points", a.columns_are_points},
                {"projective", a.projective},
                {"output", a.output}},
               0, {a.input}, std::move(outputs));
    std::printf("found %zu polynomials (rank %d)\n", eq.polynomials.size(),
                eq.rank);
}

struct TangentArgs {
    std::string input;
    std::string eqs;
    bool columns_are_points = false;
    int index = -1;
    std::string rule = "machine";
    double gap_decades = 2.0;
    double tau = 0.0;
    bool tau_set = false;
    std::string output = "tangent.json";
};

void run_tangent(const TangentArgs& a) {
    const ManifestClock clock;
    const PointCloud cloud = load_cloud(a.input, a.columns_are_points, false);
    const std::vector<Polynomial> F = read_polynomials(a.eqs);
    const ToleranceRule rule =
        resolve_rule(a.rule, a.gap_decades, a.tau, a.tau_set);

    nlohmann::json payload;
    if (a.index >= 0) {
        if (a.index >= cloud.m())
            throw invalid_input("--index is past the end of the sample");
        TangentEstimate te =
            tangent_space(F, cloud.points.row(a.index).transpose(), rule);
        te.index = a.index;
        payload = tangent_to_json(te);
    } else {
        payload = nlohmann::json::array();
        for (int i = 0; i < cloud.m(); ++i) {
            TangentEstimate te =
                tangent_space(F, cloud.points.row(i).transpose(), rule);
            te.index = i;
            payload.push_back(tangent_to_json(te));
        }
    }
    write_json(a.output, payload);

    clock.emit("tangent",
               {{"input", a.input},
                {"eqs", a.eqs},
                {"index", a.index},
                {"rule", a.rule},
                {"output", a.output}},
               0, {a.input, a.eqs}, {a.output});
}

struct ReachArgs {
    std::string input;
    std::string eqs;
    bool columns_are_points = false;
    std::string rule = "machine";
    double gap_decades = 2.0;
    double tau = 0.0;
    bool tau_set = false;
    std::string output = "reach.json";
};

void run_reach(const ReachArgs& a) {
    const ManifestClock clock;
    const PointCloud cloud = load_cloud(a.input, a.columns_are_points, false);
    const std::vector<Polynomial> F = read_polynomials(a.eqs);
    const double reach = empirical_reach(
        cloud, F, resolve_rule(a.rule, a.gap_decades, a.tau, a.tau_set));

    write_json(a.output, nlohmann::json{{"reach", reach}, {"m", cloud.m()}});
    clock.emit("reach",
               {{"input", a.input},
                {"eqs", a.eqs},
                {"rule", a.rule},
                {"output", a.output}},
               0, {a.input, a.eqs}, {a.output});
    std::printf("reach %s\n", detail::format_double(reach).c_str());
}

struct BarcodeArgs {
    std::string input;
    bool columns_are_points = false;
    bool projective = false;
    int max_dim = 1;
    double max_scale = 1.0;
    bool ellipsoid = false;
    std::string eqs;
    double lambda = 0.01;
    int longest = 0;
    bool svg = false;
    std::string output = "barcode.json";
};

void run_barcode(const BarcodeArgs& a) {
    const ManifestClock clock;
    const long long cap = simplex_cap_from_env();
    const PointCloud cloud =
        load_cloud(a.input, a.columns_are_points, a.projective);

    DistanceMatrix dist;
    std::vector<std::string> inputs{a.input};
    if (a.ellipsoid) {
        if (a.eqs.empty())
            throw invalid_input("--ellipsoid requires --eqs with the equations");
        inputs.push_back(a.eqs);
        dist = ellipsoid_distance_matrix(cloud, read_polynomials(a.eqs),
                                         a.lambda);
    } else {
        dist = distance_matrix(cloud);
    }

    const Barcode bc = vietoris_rips_barcode(dist, a.max_dim, a.max_scale, cap);
    write_json(a.output, barcode_to_json(bc));
    std::vector<std::string> outputs{a.output};
    if (a.svg) {
        const std::string path = svg_path_for(a.output);
        std::ofstream out(path);
        if (!out) throw parse_error("cannot write '" + path + "'");
        out << barcode_svg(bc, a.longest);
        outputs.push_back(path);
    }

    clock.emit("barcode",
               {{"input", a.input},
                {"max_dim", a.max_dim},
                {"max_scale", a.max_scale},
                {"ellipsoid", a.ellipsoid},
                {"eqs", a.eqs},
                {"lambda", a.lambda},
                {"longest", a.longest},
                {"projective", a.projective},
                {"output", a.output},
                {"svg", a.svg}},
               0, std::move(inputs), std::move(outputs));
    for (std::size_t p = 0; p < bc.dims.size(); ++p)
        std::printf("H%zu: %zu intervals\n", p, bc.dims[p].size());
}

struct VolumeArgs {
    std::string poly;
    int trials = 1000;
    std::uint64_t seed = 0;
    std::string output = "volume.json";
};

void run_volume(const VolumeArgs& a) {
    const ManifestClock clock;
    const std::vector<Polynomial> polys = read_polynomials(a.poly);
    if (polys.size() != 1)
        throw invalid_input("volume expects exactly one polynomial in " +
                            a.poly);
    Rng rng(a.seed);
    const SliceEstimate est =
        real_degree_hypersurface(polys.front(), a.trials, rng);

    write_json(a.output, slice_to_json(est));
    clock.emit("volume",
               {{"poly", a.poly}, {"trials", a.trials}, {"output", a.output}},
               a.seed, {a.poly}, {a.output});
    std::printf("deg_R %s volume %s\n",
                detail::format_double(est.deg_r).c_str(),
                detail::format_double(est.volume).c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn geometric structure of a variety from point samples"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads (default 1)")
        ->check(CLI::PositiveNumber);

    SampleArgs sample;
    CLI::App* sub_sample =
        app.add_subcommand("sample", "Draw points from a model variety");
    sub_sample->add_option("--variety", sample.variety,
                           "trott | so3 | lowrank | segre | toric")
        ->required();
    sub_sample->add_option("--m", sample.m, "Sample size")
        ->required()
        ->check(CLI::PositiveNumber);
    sub_sample->add_option("--seed", sample.seed, "Random seed");
    sub_sample->add_option("-o,--output", sample.output, "Output CSV path")
        ->required();
    sub_sample->add_option("--p", sample.p);
    sub_sample->add_option("--q", sample.q);
    sub_sample->add_option("--r", sample.r);
    sub_sample->add_option("--matrix", sample.matrix_path,
                           "Integer exponent matrix CSV (toric)");
    CLI::Option* noise_round = sub_sample->add_option(
        "--noise-round", sample.noise_round, "Round coordinates to k digits");
    CLI::Option* noise_sigma = sub_sample->add_option(
        "--noise-sigma", sample.noise_sigma, "Additive Gaussian noise scale");
    noise_round->excludes(noise_sigma);
    noise_sigma->excludes(noise_round);
    CLI::Option* noise_seed = sub_sample->add_option(
        "--noise-seed", sample.noise_seed, "Seed for the noise stream");

    DimdiagArgs dimdiag;
    CLI::App* sub_dimdiag = app.add_subcommand(
        "dimdiag", "Dimension estimates across the scale grid");
    sub_dimdiag->add_option("-i,--input", dimdiag.input, "Sample CSV")
        ->required();
    sub_dimdiag->add_flag("--columns-are-points", dimdiag.columns_are_points,
                          "Transpose the CSV on load");
    sub_dimdiag->add_flag("--projective", dimdiag.projective,
                          "Treat rows as projective points");
    sub_dimdiag->add_option("--grid", dimdiag.grid, "Scale grid size");
    sub_dimdiag->add_option("--estimators", dimdiag.estimators,
                            "Estimator names (default: all)");
    sub_dimdiag->add_option("--seed", dimdiag.seed, "Random seed");
    sub_dimdiag->add_option("-o,--output", dimdiag.output, "Output JSON path");
    sub_dimdiag->add_flag("--svg", dimdiag.svg, "Also write an SVG rendering");
    sub_dimdiag->add_option("--band", dimdiag.band,
                            "Scale band lo:hi for the median printout");

    EquationsArgs equations;
    CLI::App* sub_equations = app.add_subcommand(
        "equations", "Polynomials vanishing on the sample");
    sub_equations->add_option("-i,--input", equations.input, "Sample CSV")
        ->required();
    sub_equations->add_flag("--columns-are-points",
                            equations.columns_are_points);
    sub_equations->add_flag("--projective", equations.projective);
    sub_equations->add_option("--degree", equations.degree, "Monomial degree")
        ->required();
    sub_equations->add_flag("--homogeneous", equations.homogeneous,
                            "Exact-degree basis instead of degree-at-most");
    sub_equations->add_option("--method", equations.method,
                              "svd | qr | rref");
    sub_equations->add_option("--rule", equations.rule,
                              "machine | gap | fixed");
    sub_equations->add_option("--gap-decades", equations.gap_decades,
                              "Gap rule width in decades");
    CLI::Option* tau_opt =
        sub_equations->add_option("--tau", equations.tau, "Fixed tolerance");
    sub_equations->add_option("-o,--output", equations.output,
                              "Output JSON path");
    sub_equations->add_option("--text", equations.text_path,
                              "Also write the polynomial text format");
    sub_equations->add_option("--singular-values", equations.sv_path,
                              "Write the log10 spectrum as CSV");

    TangentArgs tangent;
    CLI::App* sub_tangent = app.add_subcommand(
        "tangent", "Tangent spaces from equations at sample points");
    sub_tangent->add_option("-i,--input", tangent.input, "Sample CSV")
        ->required();
    sub_tangent->add_option("--eqs", tangent.eqs, "Polynomial text file")
        ->required();
    sub_tangent->add_flag("--columns-are-points", tangent.columns_are_points);
    sub_tangent->add_option("--index", tangent.index,
                            "Point index (default: all points)");
    sub_tangent->add_option("--rule", tangent.rule, "machine | gap | fixed");
    sub_tangent->add_option("--gap-decades", tangent.gap_decades);
    CLI::Option* tangent_tau = sub_tangent->add_option("--tau", tangent.tau);
    sub_tangent->add_option("-o,--output", tangent.output, "Output JSON path");

    ReachArgs reach;
    CLI::App* sub_reach = app.add_subcommand(
        "reach", "Empirical reach from points and tangent spaces");
    sub_reach->add_option("-i,--input", reach.input, "Sample CSV")->required();
    sub_reach->add_option("--eqs", reach.eqs, "Polynomial text file")
        ->required();
    sub_reach->add_flag("--columns-are-points", reach.columns_are_points);
    sub_reach->add_option("--rule", reach.rule, "machine | gap | fixed");
    sub_reach->add_option("--gap-decades", reach.gap_decades);
    CLI::Option* reach_tau = sub_reach->add_option("--tau", reach.tau);
    sub_reach->add_option("-o,--output", reach.output, "Output JSON path");

    BarcodeArgs barcode;
    CLI::App* sub_barcode = app.add_subcommand(
        "barcode", "Persistent homology of the Vietoris-Rips filtration");
    sub_barcode->add_option("-i,--input", barcode.input, "Sample CSV")
        ->required();
    sub_barcode->add_flag("--columns-are-points", barcode.columns_are_points);
    sub_barcode->add_flag("--projective", barcode.projective);
    sub_barcode->add_option("--max-dim", barcode.max_dim,
                            "Top homology degree");
    sub_barcode->add_option("--max-scale", barcode.max_scale,
                            "Filtration cutoff in (0, 1]");
    sub_barcode->add_flag("--ellipsoid", barcode.ellipsoid,
                          "Tangent-aligned reweighted metric");
    sub_barcode->add_option("--eqs", barcode.eqs,
                            "Equations for the ellipsoid metric");
    sub_barcode->add_option("--lambda", barcode.lambda,
                            "Ellipsoid shrink factor");
    sub_barcode->add_option("--longest", barcode.longest,
                            "Keep only this many longest bars in the SVG");
    sub_barcode->add_flag("--svg", barcode.svg, "Also write an SVG rendering");
    sub_barcode->add_option("-o,--output", barcode.output, "Output JSON path");

    VolumeArgs volume;
    CLI::App* sub_volume = app.add_subcommand(
        "volume", "Real degree and volume of a projective hypersurface");
    sub_volume->add_option("--poly", volume.poly, "Polynomial text file")
        ->required();
    sub_volume->add_option("--trials", volume.trials, "Random lines to draw")
        ->check(CLI::PositiveNumber);
    sub_volume->add_option("--seed", volume.seed, "Random seed");
    sub_volume->add_option("-o,--output", volume.output, "Output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report("usage", e.what());
        return 1;
    }

    set_max_threads(threads);
    sample.p_set = sub_sample->count("--p") > 0;
    sample.q_set = sub_sample->count("--q") > 0;
    sample.r_set = sub_sample->count("--r") > 0;
    sample.noise_round_set = noise_round->count() > 0;
    sample.noise_sigma_set = noise_sigma->count() > 0;
    sample.noise_seed_set = noise_seed->count() > 0;
    equations.tau_set = tau_opt->count() > 0;
    tangent.tau_set = tangent_tau->count() > 0;
    reach.tau_set = reach_tau->count() > 0;

    try {
        if (sub_sample->parsed())
            run_sample(sample);
        else if (sub_dimdiag->parsed())
            run_dimdiag(dimdiag);
        else if (sub_equations->parsed())
            run_equations(equations);
        else if (sub_tangent->parsed())
            run_tangent(tangent);
        else if (sub_reach->parsed())
            run_reach(reach);
        else if (sub_barcode->parsed())
            run_barcode(barcode);
        else
            run_volume(volume);
        return 0;
    } catch (const parse_error& e) {
        report("parse", e.what());
        return 2;
    } catch (const capacity_error& e) {
        report("capacity", e.what());
        return 3;
    } catch (const degenerate_sample& e) {
        report("degenerate", e.what());
        return 3;
    } catch (const invalid_input& e) {
        report("usage", e.what());
        return 1;
    } catch (const std::exception& e) {
        report("internal", e.what());
        return 3;
    }
}
