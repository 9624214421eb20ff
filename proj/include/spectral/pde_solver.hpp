#pragma once

#include <optional>
#include <vector>

#include "spectral/grid.hpp"
#include "spectral/kernels.hpp"
#include "spectral/nonlocal_operator.hpp"

namespace spectral {

/// Smoothed positive part (v + sqrt(v^2 + eps^2))/2 - eps/2, clipped at 0:
/// nonnegative, smooth, derivative in [0,1], -> v_+ as eps -> 0.
double smoothed_pos(double v, double eps);
double smoothed_neg(double v, double eps);

/// All discretization knobs for the monotone scheme.
struct SchemeParams {
    GridSpec grid;
    InteractionKernel kernel = InteractionKernel::dyson();
    double dt = 1e-2;           // upper bound; the scheme adapts below it
    double eps_smooth = 1e-3;   // smoothing width for the upwind switches
    double eps_kernel = -1.0;   // kernel mollification width, default h/2
    double cfl_safety = 0.45;
    std::optional<DriftField> drift;
    std::optional<PvQuadratureParams> quad; // default: delta = 10h, far_cut = width
    bool adaptive = true;       // false: fixed dt (still monotonicity-repaired)
    double wishart_c = 0.0;     // used when kernel.kind() == Wishart

    double resolved_eps_kernel() const { return eps_kernel > 0 ? eps_kernel : grid.h() / 2; }
    PvQuadratureParams resolved_quad() const
    {
        return quad ? *quad : PvQuadratureParams::defaults_for(grid);
    }
};

struct StepRecord {
    double time;
    double max_dxF;   // forward differences, the discrete Lipschitz monitor
    double dt_used;
    int repairs;
};

struct SolveReport {
    GridCDF final;
    std::vector<StepRecord> trace;

    // CSV columns t,max_dxF,dt_used,repairs
    void write_trace_csv(std::ostream& os) const;
};

/// One explicit Euler update of the regularized upwind scheme
///   F <- F - dt [ D-F psi_{+,eps}(V) - D+F psi_{-,eps}(V) ],  V = L_delta[F] + B,
/// at every interior node; boundary nodes stay pinned, the output is clamped
/// to [0, mass].  dt is reduced by the CFL bound; if any adjacent pair still
/// inverts by more than 1e-14 the step is redone at dt/2 (repair_count).
GridCDF step_monotone(const GridCDF& f, const SchemeParams& p);

/// As step_monotone but with the step size forced (no CFL), for scheme
/// property tests that need a common dt across inputs.
GridCDF step_monotone_fixed(const GridCDF& f, const SchemeParams& p, double dt_forced,
                            int* repairs = nullptr);

/// March to t_end, snapshotting at record_times (increasing, in [0, t_end]).
std::pair<std::vector<GridCDF>, SolveReport>
solve(const GridCDF& f0, double t_end, const SchemeParams& p,
      const std::vector<double>& record_times);

/// Solve from a one-node jump at x = 0 and return F(t_probe).  The contract
/// is that the result tracks the spreading self-similar profile, not the
/// frozen step.
GridCDF dirac_selection_test(const SchemeParams& p, double t_probe);

} // namespace spectral
