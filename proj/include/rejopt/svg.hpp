#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "rejopt/curves.hpp"
#include "rejopt/format.hpp"

namespace rejopt {

// Self-contained static SVG line chart; no styling dependencies.
namespace svg {

inline constexpr int kWidth = 640;
inline constexpr int kHeight = 480;
inline constexpr int kMargin = 56;

inline const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};
    return palette[i % 7];
}

struct Series {
    std::string label;
    const CurveSeries* curve;
};

inline void write_plot(std::ostream& out, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<Series>& series) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool any = false;
    for (const auto& s : series)
        for (const auto& p : s.curve->points) {
            if (!any) {
                xmin = xmax = p.x;
                ymin = ymax = p.y;
                any = true;
            }
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

    const double px0 = kMargin, px1 = kWidth - kMargin / 2;
    const double py0 = kHeight - kMargin, py1 = kMargin / 2;
    auto sx = [&](double x) { return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0); };
    auto sy = [&](double y) { return py0 + (y - ymin) / (ymax - ymin) * (py1 - py0); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // axes and ticks
    out << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px1 << "\" y2=\"" << py0
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px0 << "\" y2=\"" << py1
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << py0 << "\" x2=\"" << sx(fx) << "\" y2=\""
            << py0 + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << py0 + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << format_fixed(fx, 2) << "</text>\n";
        out << "<line x1=\"" << px0 - 4 << "\" y1=\"" << sy(fy) << "\" x2=\"" << px0 << "\" y2=\""
            << sy(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px0 - 6 << "\" y=\"" << sy(fy) + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << format_fixed(fy, 2) << "</text>\n";
    }
    out << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << kHeight - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << (py0 + py1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 14 "
        << (py0 + py1) / 2 << ")\">" << ylabel << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        if (s.curve->points.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : s.curve->points) out << sx(p.x) << ',' << sy(p.y) << ' ';
        out << "\"/>\n";
        const double ly = py1 + 16 + 16 * static_cast<double>(i);
        out << "<line x1=\"" << px1 - 130 << "\" y1=\"" << ly - 4 << "\" x2=\"" << px1 - 106
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color(i) << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << px1 - 100 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace svg
}  // namespace rejopt
