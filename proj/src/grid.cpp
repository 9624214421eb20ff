#include "spectral/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace spectral {

GridSpec::GridSpec(double lo_, double hi_, std::size_t n_) : lo(lo_), hi(hi_), n(n_)
{
    if (!(hi > lo)) throw std::invalid_argument("GridSpec: hi must exceed lo");
    if (n < 2) throw std::invalid_argument("GridSpec: need at least two nodes");
}

std::size_t GridSpec::nearest_node(double xq) const
{
    double r = (xq - lo) / h();
    long i = std::lround(r);
    i = std::max(0L, std::min(static_cast<long>(n) - 1, i));
    return static_cast<std::size_t>(i);
}

bool GridSpec::same_as(const GridSpec& other, double tol) const
{
    return n == other.n && std::abs(lo - other.lo) <= tol && std::abs(hi - other.hi) <= tol;
}

GridFunction::GridFunction(GridSpec g, std::vector<double> v)
    : grid(g), values(std::move(v))
{
    if (values.size() != grid.n)
        throw std::invalid_argument("GridFunction: value count does not match grid");
}

GridCDF::GridCDF(GridSpec grid, std::vector<double> values, double mass)
    : fn_(grid, std::move(values)), mass_(mass)
{
    if (!(mass_ > 0.0) || mass_ > 1.0 + 1e-12)
        throw std::invalid_argument("GridCDF: mass must lie in (0, 1]");
    const auto& v = fn_.values;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] - 1e-12)
            throw std::invalid_argument("GridCDF: values not nondecreasing");
    if (std::abs(v.front()) > tail_pin_tol)
        throw std::invalid_argument("GridCDF: left tail not pinned to 0");
    if (std::abs(v.back() - mass_) > tail_pin_tol)
        throw std::invalid_argument("GridCDF: right tail not pinned to mass");
}

void GridCDF::write_csv(std::ostream& os) const
{
    os << "x,F\n";
    char buf[96];
    for (std::size_t i = 0; i < size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", x(i), fn_.values[i]);
        os << buf << '\n';
    }
}

GridCDF GridCDF::read_csv(std::istream& is, double mass)
{
    std::string line;
    std::getline(is, line); // header
    std::vector<double> xs, fs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        xs.push_back(std::stod(a));
        fs.push_back(std::stod(b));
    }
    if (xs.size() < 2) throw std::invalid_argument("GridCDF csv: too few rows");
    GridSpec g(xs.front(), xs.back(), xs.size());
    return GridCDF(g, std::move(fs), mass);
}

GridCDF empirical_cdf(const OrderedSpectrum& s, const GridSpec& grid)
{
    const auto& pos = s.positions();
    const double h = grid.h();
    if (grid.lo > pos.front() - h + 1e-15 || grid.hi < pos.back() + h - 1e-15)
        throw coverage_error("empirical_cdf: grid does not cover the spectrum with one-cell margin");
    const double n = static_cast<double>(s.count());
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        auto cnt = std::upper_bound(pos.begin(), pos.end(), grid.x(i)) - pos.begin();
        v[i] = static_cast<double>(cnt) / n;
    }
    return GridCDF(grid, std::move(v), 1.0);
}

bool cdf_dominates(const GridCDF& f1, const GridCDF& f2, double tol)
{
    if (!f1.grid().same_as(f2.grid()))
        throw grid_mismatch_error("cdf_dominates: grids differ");
    for (std::size_t i = 0; i < f1.size(); ++i)
        if (f1[i] < f2[i] - tol) return false;
    return true;
}

double quantile(const GridCDF& f, double p)
{
    if (!(p > 0.0) || !(p < f.mass()))
        throw std::invalid_argument("quantile: p outside (0, mass)");
    const auto& v = f.values();
    auto it = std::lower_bound(v.begin(), v.end(), p - 1e-15);
    std::size_t j = static_cast<std::size_t>(it - v.begin());
    if (j == 0) return f.x(0);
    const double jump = v[j] - v[j - 1];
    // steep single-cell rises are atoms: the whole probability jump maps to
    // the node; smooth cells are inverted linearly
    if (jump > 0.01 * f.mass() || jump <= 0.0) return f.x(j);
    double w = (p - v[j - 1]) / jump;
    return f.x(j - 1) + w * f.h();
}

} // namespace spectral
