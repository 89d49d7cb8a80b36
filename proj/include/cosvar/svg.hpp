#pragma once

#include <string>
#include <vector>

namespace cosvar {

struct ScatterPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> xs;
    std::vector<double> ys;
    bool log_scale = true;
    bool identity_line = true;
};

/// Minimal standalone SVG scatter with axes, decade ticks and a y = x line.
std::string render_svg(const ScatterPlot& plot);

}  // namespace cosvar
