#include "spectral/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace spectral {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<PlotSeries>& series)
{
    const double W = 720, H = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 50;

    double xlo = std::numeric_limits<double>::max(), xhi = std::numeric_limits<double>::lowest();
    double ylo = xlo, yhi = xhi;
    for (const auto& s : series) {
        for (double v : s.x) { xlo = std::min(xlo, v); xhi = std::max(xhi, v); }
        for (double v : s.y) { ylo = std::min(ylo, v); yhi = std::max(yhi, v); }
    }
    if (!(xhi > xlo)) { xhi = xlo + 1; }
    if (!(yhi > ylo)) { yhi = ylo + 1; }
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;

    auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_svg_chart: cannot open " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << "</text>\n";
    os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
       << H - mt - mb << "' fill='none' stroke='#333'/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double xv = xlo + (xhi - xlo) * k / 4;
        const double yv = ylo + (yhi - ylo) * k / 4;
        os << "<text x='" << px(xv) << "' y='" << H - mb + 18
           << "' text-anchor='middle' font-size='11'>" << fmt(xv) << "</text>\n";
        os << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
           << "' text-anchor='end' font-size='11'>" << fmt(yv) << "</text>\n";
        os << "<line x1='" << px(xv) << "' y1='" << H - mb << "' x2='" << px(xv) << "' y2='"
           << H - mb + 4 << "' stroke='#333'/>\n";
        os << "<line x1='" << ml - 4 << "' y1='" << py(yv) << "' x2='" << ml << "' y2='"
           << py(yv) << "' stroke='#333'/>\n";
    }

    int ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % 6];
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        os << "'/>\n";
        os << "<text x='" << W - mr - 8 << "' y='" << mt + 16 + 16 * ci
           << "' text-anchor='end' font-size='12' fill='" << color << "'>" << s.label
           << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
}

} // namespace spectral
