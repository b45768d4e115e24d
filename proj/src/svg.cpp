#include "evplatoon/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "evplatoon/format.hpp"

namespace evp {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void grow(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

const std::string& series_color(std::size_t index) {
    static const std::array<std::string, 6> palette = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};
    return palette[index % palette.size()];
}

void write_svg_plot(std::ostream& out, const SvgPlot& plot) {
    const double left = 64, right = 16, top = 36, bottom = 46;
    const double plot_w = plot.width - left - right;
    const double plot_h = plot.height - top - bottom;

    Range rx, ry;
    for (const auto& s : plot.series) {
        for (double v : s.x) rx.grow(v);
        for (double v : s.y) ry.grow(v);
    }
    for (const auto& m : plot.markers) {
        rx.grow(m.x);
        ry.grow(m.y);
    }
    rx.pad();
    ry.pad();

    auto px = [&](double x) { return left + (x - rx.lo) / (rx.hi - rx.lo) * plot_w; };
    auto py = [&](double y) { return top + (ry.hi - y) / (ry.hi - ry.lo) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
        << plot.height << "\" viewBox=\"0 0 " << plot.width << " " << plot.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<clipPath id=\"plotarea\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\""
        << plot_w << "\" height=\"" << plot_h << "\"/></clipPath>\n";

    out << "<text x=\"" << plot.width / 2.0 << "\" y=\"20\" font-family=\"sans-serif\" "
        << "font-size=\"14\" text-anchor=\"middle\">" << plot.title << "</text>\n";

    // ticks
    const double sx = nice_step(rx.hi - rx.lo, 6);
    for (double t = std::ceil(rx.lo / sx) * sx; t <= rx.hi + 1e-12 * sx; t += sx) {
        const double x = px(t);
        out << "<line x1=\"" << x << "\" y1=\"" << top + plot_h << "\" x2=\"" << x << "\" y2=\""
            << top + plot_h + 5 << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << num_g(t, 6) << "</text>\n";
    }
    const double sy = nice_step(ry.hi - ry.lo, 6);
    for (double t = std::ceil(ry.lo / sy) * sy; t <= ry.hi + 1e-12 * sy; t += sy) {
        const double y = py(t);
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\""
            << y << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << num_g(t, 6) << "</text>\n";
    }

    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << left + plot_w / 2.0 << "\" y=\"" << plot.height - 8
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << plot.x_label
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << top + plot_h / 2.0
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 14 " << top + plot_h / 2.0 << ")\">" << plot.y_label
        << "</text>\n";

    out << "<g clip-path=\"url(#plotarea)\">\n";
    for (const auto& s : plot.series) {
        if (s.x.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
            << s.stroke_width << "\"";
        if (s.dashed) out << " stroke-dasharray=\"6,4\"";
        out << " points=\"";
        // cap the emitted points; plots do not need every integration step
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 4000);
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            out << num_g(px(s.x[i]), 6) << "," << num_g(py(s.y[i]), 6) << " ";
        }
        if ((s.x.size() - 1) % stride != 0) {
            out << num_g(px(s.x.back()), 6) << "," << num_g(py(s.y.back()), 6);
        }
        out << "\"/>\n";
    }
    for (const auto& m : plot.markers) {
        const double x = px(m.x), y = py(m.y), r = m.size;
        if (m.glyph == SvgMarker::Glyph::cross) {
            out << "<line x1=\"" << x - r << "\" y1=\"" << y - r << "\" x2=\"" << x + r
                << "\" y2=\"" << y + r << "\" stroke=\"" << m.color << "\" stroke-width=\"2\"/>\n";
            out << "<line x1=\"" << x - r << "\" y1=\"" << y + r << "\" x2=\"" << x + r
                << "\" y2=\"" << y - r << "\" stroke=\"" << m.color << "\" stroke-width=\"2\"/>\n";
        } else {
            out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\""
                << m.color << "\"/>\n";
        }
    }
    out << "</g>\n";

    double legend_y = top + 14;
    for (const auto& s : plot.series) {
        if (s.label.empty()) continue;
        out << "<line x1=\"" << left + plot_w - 110 << "\" y1=\"" << legend_y - 4 << "\" x2=\""
            << left + plot_w - 88 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"";
        if (s.dashed) out << " stroke-dasharray=\"6,4\"";
        out << "/>\n";
        out << "<text x=\"" << left + plot_w - 82 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        legend_y += 16;
    }

    out << "</svg>\n";
}

}  // namespace evp
