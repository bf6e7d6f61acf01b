#pragma once

// Minimal static SVG line charts: enough for regret-vs-t plots with a few
// series, an optional log-scaled x axis and a legend.  Output is plain text
// with deterministic number formatting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "duelbatch/errors.hpp"

namespace duelbatch::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;  // used for overlays / reference curves
};

struct ChartOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label = "cumulative regret";
    bool log_x = false;
    int width = 960;
    int height = 600;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return kColors[i % (sizeof kColors / sizeof kColors[0])];
}

}  // namespace detail

inline void write_chart(std::ostream& out, const std::vector<Series>& series,
                        const ChartOptions& opt) {
    if (series.empty()) throw UsageError("write_chart: no series to plot");

    const double margin_l = 72, margin_r = 24, margin_t = 40, margin_b = 48;
    const double pw = opt.width - margin_l - margin_r;
    const double ph = opt.height - margin_t - margin_b;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            const double xv = s.x[k], yv = s.y[k];
            if (opt.log_x && xv <= 0) continue;
            if (first) {
                xmin = xmax = xv;
                ymin = ymax = yv;
                first = false;
            } else {
                xmin = std::min(xmin, xv);
                xmax = std::max(xmax, xv);
                ymin = std::min(ymin, yv);
                ymax = std::max(ymax, yv);
            }
        }
    }
    if (first) throw UsageError("write_chart: series contain no plottable points");
    if (xmax <= xmin) xmax = xmin + 1;
    ymin = std::min(ymin, 0.0);
    if (ymax <= ymin) ymax = ymin + 1;

    auto xpos = [&](double v) {
        double f = opt.log_x ? (std::log(v) - std::log(xmin)) / (std::log(xmax) - std::log(xmin))
                             : (v - xmin) / (xmax - xmin);
        return margin_l + f * pw;
    };
    auto ypos = [&](double v) { return margin_t + (1.0 - (v - ymin) / (ymax - ymin)) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty()) {
        out << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << opt.title << "</text>\n";
    }

    // axes
    out << "<line x1=\"" << detail::num(margin_l) << "\" y1=\"" << detail::num(margin_t)
        << "\" x2=\"" << detail::num(margin_l) << "\" y2=\"" << detail::num(margin_t + ph)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << detail::num(margin_l) << "\" y1=\"" << detail::num(margin_t + ph)
        << "\" x2=\"" << detail::num(margin_l + pw) << "\" y2=\"" << detail::num(margin_t + ph)
        << "\" stroke=\"black\"/>\n";

    // x ticks: decades when log-scaled, else five even steps
    std::vector<double> xticks;
    if (opt.log_x) {
        for (int d = static_cast<int>(std::floor(std::log10(xmin)));
             d <= static_cast<int>(std::ceil(std::log10(xmax))); ++d) {
            const double v = std::pow(10.0, d);
            if (v >= xmin * 0.999 && v <= xmax * 1.001) xticks.push_back(v);
        }
        if (xticks.empty()) xticks = {xmin, xmax};
    } else {
        for (int k = 0; k <= 5; ++k) xticks.push_back(xmin + (xmax - xmin) * k / 5.0);
    }
    for (double v : xticks) {
        const double px = xpos(v);
        out << "<line x1=\"" << detail::num(px) << "\" y1=\"" << detail::num(margin_t + ph)
            << "\" x2=\"" << detail::num(px) << "\" y2=\"" << detail::num(margin_t + ph + 5)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << detail::num(px) << "\" y=\"" << detail::num(margin_t + ph + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::num(v) << "</text>\n";
    }
    for (int k = 0; k <= 5; ++k) {
        const double v = ymin + (ymax - ymin) * k / 5.0;
        const double py = ypos(v);
        out << "<line x1=\"" << detail::num(margin_l - 5) << "\" y1=\"" << detail::num(py)
            << "\" x2=\"" << detail::num(margin_l) << "\" y2=\"" << detail::num(py)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << detail::num(margin_l - 8) << "\" y=\"" << detail::num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::num(v) << "</text>\n";
    }
    out << "<text x=\"" << opt.width / 2 << "\" y=\"" << opt.height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << opt.x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << opt.height / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << opt.height / 2 << ")\">" << opt.y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"1.5\"";
        if (series[s].dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (std::size_t k = 0; k < series[s].x.size(); ++k) {
            if (opt.log_x && series[s].x[k] <= 0) continue;
            if (k) out << ' ';
            out << detail::num(xpos(series[s].x[k])) << ',' << detail::num(ypos(series[s].y[k]));
        }
        out << "\"/>\n";
        const double ly = margin_t + 16 + 16 * static_cast<double>(s);
        out << "<line x1=\"" << detail::num(margin_l + 10) << "\" y1=\"" << detail::num(ly - 4)
            << "\" x2=\"" << detail::num(margin_l + 34) << "\" y2=\"" << detail::num(ly - 4)
            << "\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"1.5\""
            << (series[s].dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        out << "<text x=\"" << detail::num(margin_l + 40) << "\" y=\"" << detail::num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

inline void write_chart(const std::string& path, const std::vector<Series>& series,
                        const ChartOptions& opt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write SVG file: " + path);
    write_chart(out, series, opt);
}

}  // namespace duelbatch::svg
