#pragma once

#include <torwave/grid_field.hpp>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace torwave {

// All emitted floats are pinned to 17 significant digits so equal configs
// produce byte-identical artifacts regardless of serializer internals.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void dump_g17_rec(const nlohmann::ordered_json& j, std::string& out, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    const std::string pad1(2 * static_cast<std::size_t>(depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::number_float: {
            double x = j.get<double>();
            if (std::isfinite(x))
                out += fmt_g17(x);
            else  // JSON has no literals for these; quote them
                out += x > 0 ? "\"inf\"" : (x < 0 ? "\"-inf\"" : "\"nan\"");
            break;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += pad1;
                dump_g17_rec(j[i], out, depth + 1);
                if (i + 1 < j.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            break;
        }
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            std::size_t i = 0;
            for (const auto& [key, val] : j.items()) {
                out += pad1 + nlohmann::json(key).dump() + ": ";
                dump_g17_rec(val, out, depth + 1);
                if (++i < j.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            break;
        }
        default:
            out += j.dump();  // null, bool, integers, strings
    }
}

}  // namespace detail

inline std::string dump_g17(const nlohmann::ordered_json& j) {
    std::string out;
    detail::dump_g17_rec(j, out, 0);
    out += '\n';
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path);
}

// Raw samples (row-major, last axis fastest) next to a JSON header.
inline void save_field(const GridField& u, const std::string& base) {
    static_assert(std::endian::native == std::endian::little,
                  "field dumps are declared little-endian");
    std::ofstream bin(base + ".bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(u.samples.data()),
              static_cast<std::streamsize>(u.samples.size() * sizeof(Cplx)));
    if (!bin) throw std::runtime_error("cannot write " + base + ".bin");

    nlohmann::ordered_json h;
    h["schema"] = "1";
    h["dtype"] = "complex128";
    h["byte_order"] = "little-endian";
    h["layout"] = "row-major, last axis fastest";
    h["dims"] = u.res;
    nlohmann::ordered_json periods = nlohmann::ordered_json::array();
    for (const auto& A : u.torus.periods) periods.push_back(format_rational(A));
    h["periods"] = std::move(periods);
    write_text_file(base + ".json", dump_g17(h));
}

struct PlotSeries {
    std::string label;
    DVec x, y;
    std::string color = "#1f6fb2";
};

// Static line plot; enough for energy histories and angle traces.
inline std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                                 const std::string& ylabel,
                                 const std::vector<PlotSeries>& series) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin <= xmax)) xmin = 0, xmax = 1;
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    const double L = 70, R = 690, T = 40, B = 420;
    auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (R - L); };
    auto Y = [&](double y) { return B - (y - ymin) / (ymax - ymin) * (B - T); };
    char buf[256];
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 470\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"720\" height=\"470\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                  "stroke=\"#444\"/>\n",
                  L, T, R - L, B - T);
    svg += buf;
    for (int i = 0; i <= 4; ++i) {
        double fx = xmin + (xmax - xmin) * i / 4.0;
        double fy = ymin + (ymax - ymin) * i / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#444\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%.4g</text>\n",
                      X(fx), B, X(fx), B + 5, X(fx), B + 18, fx);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#444\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%.4g</text>\n",
                      L - 5, Y(fy), L, Y(fy), L - 8, Y(fy) + 4, fy);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-size=\"14\">%s"
                  "</text>\n",
                  0.5 * (L + R), T - 14, title.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"450\" text-anchor=\"middle\">%s</text>\n", 0.5 * (L + R),
                  xlabel.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"16\" y=\"%.2f\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
                  "%.2f)\">%s</text>\n",
                  0.5 * (T + B), 0.5 * (T + B), ylabel.c_str());
    svg += buf;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(s.x[i]), Y(s.y[i]));
            pts += buf;
        }
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
               pts + "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%.2f\" fill=\"%s\">%s</text>\n", R - 150.0,
                      T + 18.0 + 16.0 * static_cast<double>(k), s.color.c_str(),
                      s.label.c_str());
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace torwave
