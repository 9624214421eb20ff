#include "spectral/laws_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

namespace spectral {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth)
{
    const double m = (a + b) / 2;
    const double lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
         + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol)
{
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

AnalyticLaw AnalyticLaw::semicircle(double t, double radius_coeff)
{
    AnalyticLaw law;
    law.family = Family::Semicircle;
    law.t = t;
    law.radius_coeff = radius_coeff;
    if (!(t > 0) || !(radius_coeff > 0))
        throw std::invalid_argument("semicircle law: t and radius_coeff must be positive");
    return law;
}

AnalyticLaw AnalyticLaw::marchenko_pastur(double sigma, double c, double edge_coeff)
{
    AnalyticLaw law;
    law.family = Family::MarchenkoPastur;
    law.sigma = sigma;
    law.c = c;
    law.edge_coeff = edge_coeff;
    if (!(sigma > 0) || !(c >= 1) || !(edge_coeff > 0))
        throw std::invalid_argument("MP law: need sigma > 0, c >= 1, edge_coeff > 0");
    return law;
}

double AnalyticLaw::support_lo() const
{
    if (family == Family::Semicircle) return -radius_coeff * std::sqrt(t);
    const double s2 = edge_coeff * sigma * sigma;
    const double r = std::sqrt(1.0 / c);
    return s2 * (1 - r) * (1 - r);
}

double AnalyticLaw::support_hi() const
{
    if (family == Family::Semicircle) return radius_coeff * std::sqrt(t);
    const double s2 = edge_coeff * sigma * sigma;
    const double r = std::sqrt(1.0 / c);
    return s2 * (1 + r) * (1 + r);
}

double AnalyticLaw::density(double x) const
{
    if (family == Family::Semicircle) {
        const double r = radius_coeff * std::sqrt(t);
        if (x <= -r || x >= r) return 0.0;
        return 2.0 / (M_PI * r * r) * std::sqrt(r * r - x * x);
    }
    const double lo = support_lo(), hi = support_hi();
    if (x <= lo || x >= hi) return 0.0;
    const double s2 = edge_coeff * sigma * sigma;
    return c * std::sqrt((hi - x) * (x - lo)) / (2 * M_PI * s2 * x);
}

double AnalyticLaw::cdf(double x) const
{
    const double lo = support_lo(), hi = support_hi();
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    auto dens = [this](double s) { return density(s); };
    return std::min(1.0, integrate(dens, lo, x, 1e-11));
}

SemicircleCalibration calibrate_semicircle(const std::vector<OrderedSpectrum>& ensemble, double t)
{
    if (ensemble.empty()) throw std::invalid_argument("calibrate_semicircle: empty ensemble");
    double m2 = 0.0;
    std::size_t total = 0;
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (const auto& s : ensemble) {
        for (double x : s.positions()) {
            m2 += x * x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        total += s.count();
    }
    m2 /= static_cast<double>(total);
    if (hi - lo < 1e-12 || m2 <= 0)
        throw std::invalid_argument("calibrate_semicircle: degenerate ensemble (zero spread)");
    // second-moment fit: semicircle m2 = R^2/4, R = radius_coeff sqrt(t)
    const double fitted = 2 * std::sqrt(m2 / t);
    SemicircleCalibration cal{AnalyticLaw::semicircle(t, fitted), fitted};
    cal.law.calibrated = true;
    return cal;
}

MpCalibration calibrate_mp(const std::vector<OrderedSpectrum>& ensemble, double sigma, double c)
{
    if (ensemble.empty()) throw std::invalid_argument("calibrate_mp: empty ensemble");
    double m1 = 0.0;
    std::size_t total = 0;
    for (const auto& s : ensemble) {
        for (double x : s.positions()) m1 += x;
        total += s.count();
    }
    m1 /= static_cast<double>(total);
    if (!(m1 > 0)) throw std::invalid_argument("calibrate_mp: nonpositive sample mean");
    // MP mean identity: m1 = edge_coeff * sigma^2
    const double fitted = m1 / (sigma * sigma);
    MpCalibration cal{AnalyticLaw::marchenko_pastur(sigma, c, fitted), fitted};
    cal.law.calibrated = true;
    return cal;
}

void SemicircleCalibration::write_report(std::ostream& os) const
{
    os << "family=semicircle\n"
       << "t=" << law.t << '\n'
       << "paper_radius_coeff=" << paper_radius_coeff << '\n'
       << "fitted_radius_coeff=" << fitted_radius_coeff << '\n';
}

void MpCalibration::write_report(std::ostream& os) const
{
    os << "family=marchenko_pastur\n"
       << "sigma=" << law.sigma << '\n'
       << "c=" << law.c << '\n'
       << "paper_edge_coeff=" << paper_edge_coeff << '\n'
       << "fitted_edge_coeff=" << fitted_edge_coeff << '\n';
}

GridCDF law_cdf(const AnalyticLaw& law, const GridSpec& grid)
{
    if (grid.lo > law.support_lo() - 1e-12 || grid.hi < law.support_hi() + 1e-12)
        throw coverage_error("law_cdf: grid does not cover the law's support");
    auto dens = [&law](double s) { return law.density(s); };
    std::vector<double> v(grid.n, 0.0);
    for (std::size_t i = 1; i < grid.n; ++i)
        v[i] = v[i - 1] + integrate(dens, grid.x(i - 1), grid.x(i), 1e-12);
    const double total = v.back();
    for (auto& val : v) val = std::clamp(val / total, 0.0, 1.0);
    for (std::size_t i = 1; i < grid.n; ++i) v[i] = std::max(v[i], v[i - 1]);
    return GridCDF(grid, std::move(v), 1.0);
}

double wasserstein_p(const GridCDF& f, const GridCDF& g, double p, std::size_t levels)
{
    if (!f.grid().same_as(g.grid()))
        throw grid_mismatch_error("wasserstein_p: grids differ");
    if (std::abs(f.mass() - g.mass()) > 1e-12)
        throw std::invalid_argument("wasserstein_p: mass mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_p: p >= 1 required");

    const bool inf_norm = std::isinf(p);
    double acc = 0.0, worst = 0.0;
    for (std::size_t k = 0; k < levels; ++k) {
        const double u = f.mass() * (static_cast<double>(k) + 0.5) / static_cast<double>(levels);
        const double d = std::abs(quantile(f, u) - quantile(g, u));
        if (inf_norm)
            worst = std::max(worst, d);
        else
            acc += std::pow(d, p);
    }
    if (inf_norm) return worst;
    return std::pow(acc / static_cast<double>(levels), 1.0 / p);
}

double ks_distance(const GridCDF& f, const GridCDF& g)
{
    if (!f.grid().same_as(g.grid()))
        throw grid_mismatch_error("ks_distance: grids differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(f[i] - g[i]));
    return worst;
}

double ks_to_law(const OrderedSpectrum& s, const AnalyticLaw& law)
{
    const auto& pos = s.positions();
    const double n = static_cast<double>(pos.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const double fx = law.cdf(pos[i]);
        worst = std::max(worst, std::abs((static_cast<double>(i) + 1) / n - fx));
        worst = std::max(worst, std::abs(static_cast<double>(i) / n - fx));
    }
    return worst;
}

GridCDF average_empirical_cdf(const std::vector<OrderedSpectrum>& ensemble, const GridSpec& grid)
{
    if (ensemble.empty()) throw std::invalid_argument("average_empirical_cdf: empty ensemble");
    std::vector<double> acc(grid.n, 0.0);
    for (const auto& s : ensemble) {
        GridCDF f = empirical_cdf(s, grid);
        for (std::size_t i = 0; i < grid.n; ++i) acc[i] += f[i];
    }
    for (auto& v : acc) v /= static_cast<double>(ensemble.size());
    return GridCDF(grid, std::move(acc), 1.0);
}

} // namespace spectral
