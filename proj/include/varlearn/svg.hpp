#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dimension.hpp"
#include "errors.hpp"
#include "numformat.hpp"
#include "topology.hpp"

namespace varlearn {

namespace detail {

inline std::string svg_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string svg_num(double v) {
    // Two decimals are plenty for pixel coordinates and keep the files small.
    const double r = std::round(v * 100.0) / 100.0;
    return format_double(r);
}

inline const char* svg_palette(int i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#17becf"};
    return colors[i % 6];
}

inline void svg_text(std::string& out, double x, double y,
                     const std::string& text, const char* extra = "") {
    out += "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\"" + extra +
           ">" + svg_escape(text) + "</text>\n";
}

inline void svg_line(std::string& out, double x1, double y1, double x2,
                     double y2, const char* stroke) {
    out += "<line x1=\"" + svg_num(x1) + "\" y1=\"" + svg_num(y1) + "\" x2=\"" +
           svg_num(x2) + "\" y2=\"" + svg_num(y2) + "\" stroke=\"" + stroke +
           "\"/>\n";
}

} // namespace detail

// One polyline per estimator over the scale axis [0, 1]; runs interrupted by
// missing values are split, and isolated values become dots. Legend on the
// right, value axis spanning [0, y_max].
inline std::string diagram_svg(const DimensionDiagram& dg, double y_max) {
    if (dg.grid.empty() || dg.curves.empty())
        throw invalid_input("diagram_svg: empty diagram");
    if (!(y_max > 0.0)) throw invalid_input("diagram_svg: y_max must be positive");

    const double left = 50, top = 20, plot_w = 440, plot_h = 340;
    const double width = 640, height = 400;
    const auto sx = [&](double eps) { return left + eps * plot_w; };
    const auto sy = [&](double v) {
        const double c = std::clamp(v, 0.0, y_max);
        return top + plot_h - c / y_max * plot_h;
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           detail::svg_num(width) + "\" height=\"" + detail::svg_num(height) +
           "\" viewBox=\"0 0 " + detail::svg_num(width) + " " +
           detail::svg_num(height) + "\" font-family=\"sans-serif\" "
           "font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    detail::svg_line(out, left, top + plot_h, left + plot_w, top + plot_h, "#333");
    detail::svg_line(out, left, top, left, top + plot_h, "#333");
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        detail::svg_line(out, sx(tick), top + plot_h, sx(tick), top + plot_h + 4,
                         "#333");
        detail::svg_text(out, sx(tick) - 8, top + plot_h + 16,
                         detail::format_double(tick));
    }
    for (double frac : {0.0, 0.5, 1.0}) {
        const double v = frac * y_max;
        detail::svg_line(out, left - 4, sy(v), left, sy(v), "#333");
        detail::svg_text(out, 8, sy(v) + 4, detail::format_double(v));
    }
    detail::svg_text(out, left + plot_w / 2 - 12, height - 6, "scale");
    detail::svg_text(out, 8, top - 6, "dimension");

    int index = 0;
    for (const auto& [name, curve] : dg.curves) {
        const char* color = detail::svg_palette(index);
        std::size_t i = 0;
        while (i < curve.size() && i < dg.grid.size()) {
            if (!curve[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < curve.size() && j + 1 < dg.grid.size() && curve[j + 1])
                ++j;
            if (j == i) {
                out += "<circle cx=\"" + detail::svg_num(sx(dg.grid[i])) +
                       "\" cy=\"" + detail::svg_num(sy(*curve[i])) +
                       "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
            } else {
                out += "<polyline fill=\"none\" stroke=\"";
                out += color;
                out += "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t k = i; k <= j; ++k) {
                    if (k > i) out += ' ';
                    out += detail::svg_num(sx(dg.grid[k])) + "," +
                           detail::svg_num(sy(*curve[k]));
                }
                out += "\"/>\n";
            }
            i = j + 1;
        }

        const double ly = top + 10 + 18.0 * index;
        detail::svg_line(out, left + plot_w + 16, ly, left + plot_w + 40, ly,
                         color);
        detail::svg_text(out, left + plot_w + 46, ly + 4, name);
        ++index;
    }

    out += "</svg>\n";
    return out;
}

// Horizontal persistence bars grouped by homology degree. With longest > 0
// only that many longest bars per degree are kept (unbounded bars count as
// the longest); bars that never die run to the right edge and end in an
// arrowhead.
inline std::string barcode_svg(const Barcode& bc, int longest = 0) {
    if (bc.dims.empty()) throw invalid_input("barcode_svg: empty barcode");
    if (longest < 0) throw invalid_input("barcode_svg: longest must be >= 0");

    std::vector<std::vector<PersistenceInterval>> kept(bc.dims.size());
    for (std::size_t p = 0; p < bc.dims.size(); ++p) {
        const auto& bars = bc.dims[p];
        if (longest == 0 || static_cast<int>(bars.size()) <= longest) {
            kept[p] = bars;
            continue;
        }
        std::vector<std::size_t> order(bars.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return bars[a].death - bars[a].birth >
                                    bars[b].death - bars[b].birth;
                         });
        order.resize(longest);
        std::sort(order.begin(), order.end());
        for (std::size_t idx : order) kept[p].push_back(bars[idx]);
    }

    double xmax = 0.0;
    int total = 0;
    for (const auto& bars : kept) {
        total += static_cast<int>(bars.size());
        for (const auto& bar : bars) {
            xmax = std::max(xmax, bar.birth);
            if (!std::isinf(bar.death)) xmax = std::max(xmax, bar.death);
        }
    }
    if (xmax <= 0.0) xmax = 1.0;

    const double left = 50, right = 30, top = 20, bottom = 30;
    const double width = 640, plot_w = width - left - right;
    const double bar_h = 8, gap = 4, group_gap = 18;
    const double height = top + total * (bar_h + gap) +
                          static_cast<double>(kept.size()) * group_gap + bottom;
    const auto sx = [&](double t) { return left + t / xmax * plot_w; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           detail::svg_num(width) + "\" height=\"" + detail::svg_num(height) +
           "\" viewBox=\"0 0 " + detail::svg_num(width) + " " +
           detail::svg_num(height) + "\" font-family=\"sans-serif\" "
           "font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double y = top;
    for (std::size_t p = 0; p < kept.size(); ++p) {
        const char* color = detail::svg_palette(static_cast<int>(p));
        detail::svg_text(out, 12, y + 12, "H" + std::to_string(p),
                         " font-weight=\"bold\"");
        y += group_gap;
        for (const auto& bar : kept[p]) {
            const double x0 = sx(bar.birth);
            const bool unbounded = std::isinf(bar.death);
            const double x1 = unbounded ? left + plot_w : sx(bar.death);
            out += "<rect class=\"bar\" x=\"" + detail::svg_num(x0) + "\" y=\"" +
                   detail::svg_num(y) + "\" width=\"" +
                   detail::svg_num(std::max(x1 - x0, 0.5)) + "\" height=\"" +
                   detail::svg_num(bar_h) + "\" fill=\"" + color + "\"/>\n";
            if (unbounded) {
                const double cy = y + bar_h / 2;
                out += "<path class=\"inf\" d=\"M " + detail::svg_num(x1) + " " +
                       detail::svg_num(cy - 5) + " L " + detail::svg_num(x1 + 8) +
                       " " + detail::svg_num(cy) + " L " + detail::svg_num(x1) +
                       " " + detail::svg_num(cy + 5) + " Z\" fill=\"" + color +
                       "\"/>\n";
            }
            y += bar_h + gap;
        }
    }

    detail::svg_line(out, left, height - bottom + 6, left + plot_w,
                     height - bottom + 6, "#333");
    for (double frac : {0.0, 0.5, 1.0}) {
        const double t = frac * xmax;
        detail::svg_line(out, sx(t), height - bottom + 6, sx(t),
                         height - bottom + 10, "#333");
        detail::svg_text(out, sx(t) - 8, height - bottom + 22,
                         detail::format_double(t));
    }

    out += "</svg>\n";
    return out;
}

} // namespace varlearn
