#pragma once

#include <string>
#include <vector>

namespace spectral {

/// Minimal self-contained SVG line chart: one polyline per series over a
/// shared x axis, with an axis box and tick labels.  Used only by the CLI's
/// optional --plots output; the numerical pipeline never depends on it.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<PlotSeries>& series);

} // namespace spectral
