#include "cosvar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cosvar/dataio.hpp"

namespace cosvar {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const ScatterPlot& plot) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(plot.xs.size(), plot.ys.size()); ++i) {
        const double x = plot.xs[i];
        const double y = plot.ys[i];
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if (plot.log_scale && (x <= 0.0 || y <= 0.0)) continue;
        pts.emplace_back(plot.log_scale ? std::log10(x) : x, plot.log_scale ? std::log10(y) : y);
    }

    // Shared range on both axes so y = x is the diagonal.
    double lo = 0.0, hi = 1.0;
    if (!pts.empty()) {
        lo = hi = pts.front().first;
        for (auto [x, y] : pts) {
            lo = std::min({lo, x, y});
            hi = std::max({hi, x, y});
        }
    }
    if (plot.log_scale) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
    }
    if (hi - lo <= 0.0) hi = lo + 1.0;

    const double span = kWidth - 2 * kMargin;
    auto px = [&](double v) { return kMargin + (v - lo) / (hi - lo) * span; };
    auto py = [&](double v) { return kHeight - kMargin - (v - lo) / (hi - lo) * span; };
    auto num = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
        << "</text>\n";
    svg << "<line x1=\"" << num(px(lo)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(hi)) << "\" y2=\""
        << num(py(lo)) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << num(px(lo)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(lo)) << "\" y2=\""
        << num(py(hi)) << "\" stroke=\"black\"/>\n";

    const int ticks = plot.log_scale ? static_cast<int>(hi - lo) : 5;
    for (int t = 0; t <= ticks; ++t) {
        const double v = lo + (hi - lo) * t / ticks;
        const std::string label = plot.log_scale ? "1e" + std::to_string(static_cast<int>(std::lround(v))) : num(v);
        svg << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(v)) << "\" y2=\""
            << num(py(lo) + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(px(v)) << "\" y=\"" << num(py(lo) + 18) << "\" text-anchor=\"middle\">" << label
            << "</text>\n";
        svg << "<line x1=\"" << num(px(lo) - 5) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(px(lo)) << "\" y2=\""
            << num(py(v)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(px(lo) - 8) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << label
            << "</text>\n";
    }
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
        << escape(plot.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2
        << ")\">" << escape(plot.y_label) << "</text>\n";

    if (plot.identity_line) {
        svg << "<line x1=\"" << num(px(lo)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(hi)) << "\" y2=\""
            << num(py(hi)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (auto [x, y] : pts) {
        svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace cosvar
