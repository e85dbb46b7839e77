#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "numformat.hpp"
#include "pointcloud.hpp"

namespace varlearn {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace detail

// Reads a CSV of coordinates, one point per row. A non-numeric first row is
// treated as a header and skipped. With columns_are_points the matrix is
// transposed after reading, for files that store one point per column.
inline PointCloud read_csv(const std::string& path, bool columns_are_points = false,
                           Ambient ambient = Ambient::Euclidean) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (c != ' ' && c != '\t') { blank = false; break; }
        if (blank) continue;

        auto tokens = detail::split_csv_line(line);
        std::vector<double> vals(tokens.size());
        bool numeric = true;
        for (std::size_t j = 0; j < tokens.size(); ++j) {
            if (!detail::parse_double(tokens[j], vals[j])) { numeric = false; break; }
        }
        if (!numeric) {
            if (first_data_line) { first_data_line = false; continue; } // header
            throw parse_error(path + ":" + std::to_string(lineno) +
                              ": non-numeric value");
        }
        first_data_line = false;
        if (!rows.empty() && vals.size() != rows.front().size())
            throw parse_error(path + ":" + std::to_string(lineno) +
                              ": inconsistent column count");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw parse_error(path + ": no data rows");

    Eigen::MatrixXd pts(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            pts(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    if (columns_are_points) pts = pts.transpose().eval();
    return PointCloud{std::move(pts), ambient};
}

// Writes one point per row, shortest round-trip decimal per coordinate.
inline void write_csv(const std::string& path, const Eigen::MatrixXd& pts) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write '" + path + "'");
    for (int i = 0; i < pts.rows(); ++i) {
        for (int j = 0; j < pts.cols(); ++j) {
            if (j) out << ',';
            out << detail::format_double(pts(i, j));
        }
        out << '\n';
    }
}

} // namespace varlearn
