#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "dimension.hpp"
#include "errors.hpp"
#include "polynomial.hpp"
#include "topology.hpp"
#include "varietygeom.hpp"
#include "version.hpp"
#include "volume.hpp"

namespace varlearn {

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j,
                                        const char* key, const char* who) {
    if (!j.is_object() || !j.contains(key))
        throw parse_error(std::string(who) + ": missing field '" + key + "'");
    return j.at(key);
}

inline double json_number(const nlohmann::json& j, const char* who) {
    if (!j.is_number())
        throw parse_error(std::string(who) + ": expected a number");
    return j.get<double>();
}

inline int json_int(const nlohmann::json& j, const char* who) {
    if (!j.is_number_integer())
        throw parse_error(std::string(who) + ": expected an integer");
    return j.get<int>();
}

} // namespace detail

// {n, terms: [[coeff, [e1..en]], ...]} with terms in the canonical monomial
// order.
inline nlohmann::json polynomial_to_json(const Polynomial& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : p.terms())
        terms.push_back(nlohmann::json::array({t.c, t.e}));
    return nlohmann::json{{"n", p.n()}, {"terms", std::move(terms)}};
}

inline Polynomial polynomial_from_json(const nlohmann::json& j) {
    const char* who = "polynomial json";
    const int n = detail::json_int(detail::json_field(j, "n", who), who);
    if (n < 1) throw parse_error(std::string(who) + ": n must be >= 1");
    const nlohmann::json& terms = detail::json_field(j, "terms", who);
    if (!terms.is_array())
        throw parse_error(std::string(who) + ": terms must be an array");

    std::vector<Term> out;
    for (const auto& entry : terms) {
        if (!entry.is_array() || entry.size() != 2)
            throw parse_error(std::string(who) + ": term must be [coeff, exponents]");
        Term t;
        t.c = detail::json_number(entry[0], who);
        if (!entry[1].is_array() || entry[1].size() != static_cast<std::size_t>(n))
            throw parse_error(std::string(who) + ": exponent vector length mismatch");
        for (const auto& e : entry[1]) {
            const int v = detail::json_int(e, who);
            if (v < 0) throw parse_error(std::string(who) + ": negative exponent");
            t.e.push_back(v);
        }
        out.push_back(std::move(t));
    }
    return Polynomial(n, std::move(out));
}

// {grid: [...], curves: {name: [...]}} with null marking scales where an
// estimator is undefined.
inline nlohmann::json diagram_to_json(const DimensionDiagram& dg) {
    nlohmann::json curves = nlohmann::json::object();
    for (const auto& [name, curve] : dg.curves) {
        nlohmann::json values = nlohmann::json::array();
        for (const auto& v : curve) {
            if (v)
                values.push_back(*v);
            else
                values.push_back(nullptr);
        }
        curves[name] = std::move(values);
    }
    return nlohmann::json{{"grid", dg.grid}, {"curves", std::move(curves)}};
}

inline DimensionDiagram diagram_from_json(const nlohmann::json& j) {
    const char* who = "diagram json";
    DimensionDiagram out;
    const nlohmann::json& grid = detail::json_field(j, "grid", who);
    if (!grid.is_array())
        throw parse_error(std::string(who) + ": grid must be an array");
    for (const auto& g : grid) out.grid.push_back(detail::json_number(g, who));

    const nlohmann::json& curves = detail::json_field(j, "curves", who);
    if (!curves.is_object())
        throw parse_error(std::string(who) + ": curves must be an object");
    for (const auto& [name, values] : curves.items()) {
        if (!values.is_array() || values.size() != out.grid.size())
            throw parse_error(std::string(who) + ": curve '" + name +
                              "' does not match the grid length");
        auto& curve = out.curves[name];
        for (const auto& v : values) {
            if (v.is_null())
                curve.push_back(std::nullopt);
            else
                curve.push_back(detail::json_number(v, who));
        }
    }
    return out;
}

// {dims: {"0": [[birth, death], ...], ...}}, death "inf" for classes that
// never die.
inline nlohmann::json barcode_to_json(const Barcode& bc) {
    nlohmann::json dims = nlohmann::json::object();
    for (std::size_t p = 0; p < bc.dims.size(); ++p) {
        nlohmann::json bars = nlohmann::json::array();
        for (const auto& bar : bc.dims[p]) {
            nlohmann::json pair = nlohmann::json::array();
            pair.push_back(bar.birth);
            if (std::isinf(bar.death))
                pair.push_back("inf");
            else
                pair.push_back(bar.death);
            bars.push_back(std::move(pair));
        }
        dims[std::to_string(p)] = std::move(bars);
    }
    return nlohmann::json{{"dims", std::move(dims)}};
}

inline Barcode barcode_from_json(const nlohmann::json& j) {
    const char* who = "barcode json";
    const nlohmann::json& dims = detail::json_field(j, "dims", who);
    if (!dims.is_object())
        throw parse_error(std::string(who) + ": dims must be an object");

    Barcode out;
    for (const auto& [key, bars] : dims.items()) {
        std::size_t used = 0;
        int p = -1;
        try {
            p = std::stoi(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || p < 0)
            throw parse_error(std::string(who) + ": bad degree key '" + key + "'");
        if (static_cast<std::size_t>(p) >= out.dims.size())
            out.dims.resize(p + 1);
        if (!bars.is_array())
            throw parse_error(std::string(who) + ": intervals must be an array");
        for (const auto& pair : bars) {
            if (!pair.is_array() || pair.size() != 2)
                throw parse_error(std::string(who) + ": interval must be [birth, death]");
            PersistenceInterval bar;
            bar.birth = detail::json_number(pair[0], who);
            if (pair[1].is_string()) {
                if (pair[1].get<std::string>() != "inf")
                    throw parse_error(std::string(who) + ": bad death marker");
                bar.death = std::numeric_limits<double>::infinity();
            } else {
                bar.death = detail::json_number(pair[1], who);
            }
            out.dims[p].push_back(bar);
        }
    }
    return out;
}

// {trials, deg_R, stderr, volume, d}
inline nlohmann::json slice_to_json(const SliceEstimate& est) {
    return nlohmann::json{{"trials", est.trials},
                          {"deg_R", est.deg_r},
                          {"stderr", est.std_error},
                          {"volume", est.volume},
                          {"d", est.d}};
}

inline SliceEstimate slice_from_json(const nlohmann::json& j) {
    const char* who = "slice json";
    SliceEstimate out;
    out.trials = detail::json_int(detail::json_field(j, "trials", who), who);
    out.deg_r = detail::json_number(detail::json_field(j, "deg_R", who), who);
    out.std_error = detail::json_number(detail::json_field(j, "stderr", who), who);
    out.volume = detail::json_number(detail::json_field(j, "volume", who), who);
    out.d = detail::json_int(detail::json_field(j, "d", who), who);
    return out;
}

// {index, corank, basis: [one array per basis vector]}
inline nlohmann::json tangent_to_json(const TangentEstimate& te) {
    nlohmann::json basis = nlohmann::json::array();
    for (int c = 0; c < te.basis.cols(); ++c) {
        nlohmann::json column = nlohmann::json::array();
        for (int r = 0; r < te.basis.rows(); ++r) column.push_back(te.basis(r, c));
        basis.push_back(std::move(column));
    }
    return nlohmann::json{
        {"index", te.index}, {"corank", te.corank}, {"basis", std::move(basis)}};
}

inline TangentEstimate tangent_from_json(const nlohmann::json& j) {
    const char* who = "tangent json";
    TangentEstimate out;
    out.index = detail::json_int(detail::json_field(j, "index", who), who);
    out.corank = detail::json_int(detail::json_field(j, "corank", who), who);
    const nlohmann::json& basis = detail::json_field(j, "basis", who);
    if (!basis.is_array())
        throw parse_error(std::string(who) + ": basis must be an array");

    const int cols = static_cast<int>(basis.size());
    int rows = 0;
    for (int c = 0; c < cols; ++c) {
        if (!basis[c].is_array())
            throw parse_error(std::string(who) + ": basis vector must be an array");
        if (c == 0)
            rows = static_cast<int>(basis[c].size());
        else if (static_cast<int>(basis[c].size()) != rows)
            throw parse_error(std::string(who) + ": ragged basis");
    }
    out.basis.resize(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            out.basis(r, c) = detail::json_number(basis[c][r], who);
    return out;
}

// Provenance record written alongside every output file.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double wall_time_seconds = 0.0;
    std::string version = library_version;
};

inline nlohmann::json manifest_to_json(const RunManifest& mf) {
    return nlohmann::json{{"command", mf.command},
                          {"config", mf.config},
                          {"seed", mf.seed},
                          {"inputs", mf.inputs},
                          {"outputs", mf.outputs},
                          {"wall_time_seconds", mf.wall_time_seconds},
                          {"version", mf.version}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    const char* who = "manifest json";
    RunManifest out;
    const nlohmann::json& command = detail::json_field(j, "command", who);
    if (!command.is_string())
        throw parse_error(std::string(who) + ": command must be a string");
    out.command = command.get<std::string>();
    out.config = detail::json_field(j, "config", who);
    const nlohmann::json& seed = detail::json_field(j, "seed", who);
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw parse_error(std::string(who) + ": seed must be an integer");
    out.seed = seed.get<std::uint64_t>();
    for (const char* key : {"inputs", "outputs"}) {
        const nlohmann::json& list = detail::json_field(j, key, who);
        if (!list.is_array())
            throw parse_error(std::string(who) + ": " + key + " must be an array");
        auto& dest = std::string(key) == "inputs" ? out.inputs : out.outputs;
        for (const auto& item : list) {
            if (!item.is_string())
                throw parse_error(std::string(who) + ": path must be a string");
            dest.push_back(item.get<std::string>());
        }
    }
    out.wall_time_seconds = detail::json_number(
        detail::json_field(j, "wall_time_seconds", who), who);
    const nlohmann::json& version = detail::json_field(j, "version", who);
    if (!version.is_string())
        throw parse_error(std::string(who) + ": version must be a string");
    out.version = version.get<std::string>();
    return out;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw parse_error("failed writing '" + path + "'");
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
}

} // namespace varlearn
