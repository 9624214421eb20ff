#include "spectral/pde_solver.hpp"

#include "spectral/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace spectral {

double smoothed_pos(double v, double eps)
{
    if (!(eps > 0)) throw std::invalid_argument("smoothed_pos: eps must be positive");
    return std::max(0.0, (v + std::sqrt(v * v + eps * eps)) / 2 - eps / 2);
}

double smoothed_neg(double v, double eps) { return smoothed_pos(-v, eps); }

namespace {

struct Velocity {
    std::vector<double> v;   // operator value + drift at every interior node
    double max_abs = 0.0;
};

Velocity velocity_field(const GridCDF& f, const SchemeParams& p)
{
    auto kernel = p.kernel;
    auto q = p.resolved_quad();
    Velocity out;
    out.v = operator_field(f.fn(), kernel, q, p.resolved_eps_kernel());
    if (p.drift) {
        for (std::size_t i = 1; i + 1 < f.size(); ++i) out.v[i] += p.drift->B(f.x(i));
    }
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
        out.max_abs = std::max(out.max_abs, std::abs(out.v[i]));
    return out;
}

double max_forward_diff(const std::vector<double>& v, double h)
{
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        m = std::max(m, std::abs(v[i + 1] - v[i]) / h);
    return m;
}

// Explicit Euler update at the given dt; returns false if the result breaks
// monotonicity beyond 1e-14 (callers then halve dt and redo).
bool try_update(const GridCDF& f, const SchemeParams& p, const Velocity& vel, double dt,
                std::vector<double>& out)
{
    const double h = f.h();
    const double eps = p.eps_smooth;
    const auto& v = f.values();
    const std::size_t n = f.size();
    out = v;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dminus = (v[i] - v[i - 1]) / h;
        const double dplus = (v[i + 1] - v[i]) / h;
        out[i] = v[i] - dt * (dminus * smoothed_pos(vel.v[i], eps)
                            - dplus * smoothed_neg(vel.v[i], eps));
        out[i] = std::clamp(out[i], 0.0, f.mass());
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (out[i + 1] < out[i] - 1e-14) return false;
    // snap roundoff-scale inversions
    for (std::size_t i = 1; i < n; ++i) out[i] = std::max(out[i], out[i - 1]);
    out[0] = v[0];
    out[n - 1] = v[n - 1];
    return true;
}

struct StepOutcome {
    std::vector<double> values;
    double dt_used;
    int repairs;
};

StepOutcome adaptive_step(const GridCDF& f, const SchemeParams& p, double dt_cap,
                          double kernel_mass)
{
    Velocity vel = velocity_field(f, p);
    const double h = f.h();
    double dt = dt_cap;
    if (p.adaptive) {
        double drift_max = 0.0;
        if (p.drift)
            for (std::size_t i = 1; i + 1 < f.size(); ++i)
                drift_max = std::max(drift_max, std::abs(p.drift->B(f.x(i))));
        const double lip = max_forward_diff(f.values(), h);
        const double denom = vel.max_abs + drift_max + h * lip * kernel_mass + 1e-12;
        dt = std::min(dt, p.cfl_safety * h / denom);
    }
    StepOutcome out;
    out.repairs = 0;
    while (true) {
        if (try_update(f, p, vel, dt, out.values)) break;
        dt /= 2;
        ++out.repairs;
        if (dt < p.dt * 1e-12)
            throw stiffness_error("pde step: dt underflow during monotonicity repair", 0, 0);
    }
    out.dt_used = dt;
    return out;
}

} // namespace

GridCDF step_monotone(const GridCDF& f, const SchemeParams& p)
{
    const double km = kernel_mass_bound(f.fn(), p.kernel, p.resolved_quad(),
                                        p.resolved_eps_kernel());
    auto out = adaptive_step(f, p, p.dt, km);
    return GridCDF(f.grid(), std::move(out.values), f.mass());
}

GridCDF step_monotone_fixed(const GridCDF& f, const SchemeParams& p, double dt_forced,
                            int* repairs)
{
    Velocity vel = velocity_field(f, p);
    std::vector<double> values;
    double dt = dt_forced;
    int rep = 0;
    while (!try_update(f, p, vel, dt, values)) {
        dt /= 2;
        ++rep;
        if (dt < dt_forced * 1e-12)
            throw stiffness_error("pde step: dt underflow during monotonicity repair", 0, 0);
    }
    if (repairs) *repairs = rep;
    return GridCDF(f.grid(), std::move(values), f.mass());
}

std::pair<std::vector<GridCDF>, SolveReport>
solve(const GridCDF& f0, double t_end, const SchemeParams& p,
      const std::vector<double>& record_times)
{
    if (!f0.grid().same_as(p.grid))
        throw grid_mismatch_error("solve: initial CDF grid differs from scheme grid");
    double prev = 0.0;
    for (double t : record_times) {
        if (t < prev - 1e-15 || t > t_end + 1e-12)
            throw std::invalid_argument("solve: record_times must be increasing within [0, t_end]");
        prev = t;
    }

    // g is independent of F: the kernel mass that feeds the CFL bound is
    // fixed for the whole march
    const double km = kernel_mass_bound(f0.fn(), p.kernel, p.resolved_quad(),
                                        p.resolved_eps_kernel());

    std::vector<GridCDF> snaps;
    SolveReport report{f0, {}};
    GridCDF f = f0;
    double t = 0.0;
    report.trace.push_back({0.0, max_forward_diff(f.values(), f.h()), 0.0, 0});

    for (double tr : record_times) {
        while (t < tr - 1e-12) {
            auto out = adaptive_step(f, p, std::min(p.dt, tr - t), km);
            f = GridCDF(f.grid(), std::move(out.values), f.mass());
            t += out.dt_used;
            report.trace.push_back({t, max_forward_diff(f.values(), f.h()),
                                    out.dt_used, out.repairs});
        }
        t = tr;
        snaps.push_back(f);
    }
    report.final = f;
    return {std::move(snaps), std::move(report)};
}

GridCDF dirac_selection_test(const SchemeParams& p, double t_probe)
{
    if (p.kernel.kind() != InteractionKernel::Kind::Dyson)
        throw std::invalid_argument("dirac_selection_test: Dyson kernel required");
    std::vector<double> v(p.grid.n, 0.0);
    for (std::size_t i = 0; i < p.grid.n; ++i)
        if (p.grid.x(i) >= 0.0) v[i] = 1.0;
    GridCDF f0(p.grid, std::move(v), 1.0);
    auto [snaps, report] = solve(f0, t_probe, p, {t_probe});
    return snaps.back();
}

void SolveReport::write_trace_csv(std::ostream& os) const
{
    os << "t,max_dxF,dt_used,repairs\n";
    char buf[120];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d", r.time, r.max_dxF, r.dt_used,
                      r.repairs);
        os << buf << '\n';
    }
}

} // namespace spectral
