#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evp {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
    double stroke_width = 1.4;
};

struct SvgMarker {
    enum class Glyph { cross, dot };
    double x = 0.0;
    double y = 0.0;
    Glyph glyph = Glyph::cross;
    std::string color = "#d62728";
    double size = 5.0;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    std::vector<SvgMarker> markers;
    int width = 760;
    int height = 520;
};

// Self-contained SVG: framed axes with 1-2-5 ticks, polyline series (dashed
// supported), glyph markers, legend from series labels.
void write_svg_plot(std::ostream& out, const SvgPlot& plot);

// Stable qualitative palette, cycling.
const std::string& series_color(std::size_t index);

}  // namespace evp
