#pragma once

#include <string>
#include <vector>

namespace rtlab::cli {

struct Series {
    std::vector<double> x, y;
    std::string label;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Plot {
    std::string title;
    std::string x_label, y_label;
    bool log_y = false;
    std::vector<Series> series;
};

/// Self-contained SVG line plot with axes, ticks and a legend.
std::string render_svg(const Plot& p, int width = 720, int height = 480);
void write_svg(const std::string& path, const Plot& p);

} // namespace rtlab::cli
