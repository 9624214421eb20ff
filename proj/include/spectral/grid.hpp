#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "spectral/ordered_spectrum.hpp"

namespace spectral {

class grid_mismatch_error : public std::invalid_argument {
public:
    explicit grid_mismatch_error(const std::string& what) : std::invalid_argument(what) {}
};

class coverage_error : public std::invalid_argument {
public:
    explicit coverage_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Uniform spatial grid: n nodes on [lo, hi], x_i = lo + i*h.
struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;

    GridSpec() = default;
    GridSpec(double lo_, double hi_, std::size_t n_);

    double h() const { return (hi - lo) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return lo + static_cast<double>(i) * h(); }
    std::size_t nearest_node(double x) const;
    bool same_as(const GridSpec& other, double tol = 1e-12) const;
};

/// Arbitrary grid function (no monotonicity assumed).  The nonlocal
/// operators act on these; beyond the grid the function is extended by its
/// endpoint values.
struct GridFunction {
    GridSpec grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridSpec g, std::vector<double> v);

    double front_tail() const { return values.front(); }
    double back_tail() const { return values.back(); }
};

/// Nondecreasing grid function with pinned tails: values[0] ~ 0 and
/// values[n-1] ~ mass, both within tail_pin_tol.
class GridCDF {
public:
    static constexpr double tail_pin_tol = 1e-9;

    GridCDF(GridSpec grid, std::vector<double> values, double mass = 1.0);

    const GridSpec& grid() const { return fn_.grid; }
    const std::vector<double>& values() const { return fn_.values; }
    double mass() const { return mass_; }
    double h() const { return fn_.grid.h(); }
    std::size_t size() const { return fn_.values.size(); }
    double x(std::size_t i) const { return fn_.grid.x(i); }
    double operator[](std::size_t i) const { return fn_.values[i]; }

    const GridFunction& fn() const { return fn_; }

    // CSV with header "x,F", full double precision
    void write_csv(std::ostream& os) const;
    static GridCDF read_csv(std::istream& is, double mass = 1.0);

private:
    GridFunction fn_;
    double mass_;
};

/// Counting function F_N(x) = #{i : s_i <= x} / N on the given grid.
/// The grid must cover [min(s)-h, max(s)+h].
GridCDF empirical_cdf(const OrderedSpectrum& s, const GridSpec& grid);

/// Pointwise F1 >= F2 - tol on a shared grid (larger CDF = smaller
/// eigenvalues; this is the continuous face of spectral dominance).
bool cdf_dominates(const GridCDF& f1, const GridCDF& f2, double tol);

/// Generalized inverse inf{x : F(x) >= p} for p in (0, mass), linearly
/// interpolated inside smooth cells.  A single-cell rise above 1% of the
/// mass is treated as an atom (atoms are represented as steep jumps on the
/// grid) and maps the whole probability jump to its node.
double quantile(const GridCDF& f, double p);

} // namespace spectral
