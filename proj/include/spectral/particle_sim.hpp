#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "spectral/kernels.hpp"
#include "spectral/ordered_spectrum.hpp"

namespace spectral {

class stiffness_error : public std::runtime_error {
public:
    stiffness_error(const std::string& what, std::size_t pair_lo, std::size_t pair_hi)
        : std::runtime_error(what), pair_lo(pair_lo), pair_hi(pair_hi) {}
    std::size_t pair_lo;
    std::size_t pair_hi;
};

struct SdeConfig {
    InteractionKernel kernel = InteractionKernel::dyson();
    std::size_t N = 2;
    double dt = 1e-3;         // base time step
    double t_end = 1.0;
    double noise_scale = -1;  // < 0 selects the per-kind default, see below
    std::optional<DriftField> drift;
    std::uint64_t seed = 0;
    double epsilon_N = -1;    // general-kernel noise, default N^{-1/2}
    double gap_safety = 0.45; // per-substep displacement cap, fraction of the adjacent gap

    /// Resolved noise coefficient for the Dyson/general constant-noise kinds.
    /// Default N^{-1/2}: the general system's vanishing-noise scale, which for
    /// Dyson also keeps adjacent gaps strictly repulsive (Bessel dimension 3);
    /// the paper's 2/sqrt(N) makes gaps a Bessel(3/2) that collides in finite
    /// time, so it is available only through the knob.
    double resolved_noise(std::size_t n) const;

    void validate(const OrderedSpectrum& initial) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<OrderedSpectrum> snapshots;
    SdeConfig config;

    // CSV columns t,i,lambda
    void write_csv(std::ostream& os) const;
    // sidecar key=value metadata (seed and full config echo)
    void write_meta(std::ostream& os) const;
};

struct DominanceViolation {
    double time;
    std::size_t index;
    double excess;
};

struct ViolationReport {
    std::vector<DominanceViolation> violations;
    double worst_excess = 0.0;   // max over the whole run of (lambda1_i - lambda2_i)+
    double tol = 0.0;
};

double drift_dyson(const OrderedSpectrum& s, std::size_t i);
double drift_wishart(const OrderedSpectrum& s, std::size_t i, double c);
double drift_general(const OrderedSpectrum& s, std::size_t i, const InteractionKernel& kernel);

/// One Euler–Maruyama attempt over dt_local with the supplied standard
/// normal draws.  A proposal that breaks strict ordering (or positivity, for
/// Wishart) is rejected and retried at dt_local/2 on the same Brownian path:
/// the increment is split Brownian-bridge-consistently using draws from
/// bridge_rng.  Refinement below dt_local * 2^-40 reports the near-collision
/// pair as a stiffness error.
OrderedSpectrum step(const OrderedSpectrum& s, const SdeConfig& cfg,
                     const std::vector<double>& gaussians, double dt_local,
                     std::mt19937_64& bridge_rng);

/// Integrate to t_end recording exactly at record_times (increasing, within
/// [0, t_end]).  Deterministic given cfg.seed.
Trajectory simulate(const SdeConfig& cfg, const OrderedSpectrum& initial,
                    const std::vector<double>& record_times);

/// Tight-cluster initial data for a start "at x0": x0 + (i/N) eta.
OrderedSpectrum cluster_start(std::size_t n, double x0 = 0.0, double eta = 1e-6);

/// Two systems driven by the same Brownian increments on a shared substep
/// schedule (when either rejects a step, both refine).  Requires
/// dominates(s1, s2) and equal counts.  Violations are recorded where
/// lambda1_i > lambda2_i + tol at a record time, tol = tol_K * cfg.dt.
struct CoupledRun {
    Trajectory first;
    Trajectory second;
    ViolationReport report;
};
CoupledRun coupled_dominance_run(const SdeConfig& cfg, const OrderedSpectrum& s1,
                                 const OrderedSpectrum& s2,
                                 const std::vector<double>& record_times,
                                 double tol_K = 10.0);

/// Final-time spectra of independent replicas; replica r uses seed ^ r.
std::vector<OrderedSpectrum> ensemble_finals(const SdeConfig& cfg, const OrderedSpectrum& initial,
                                             std::size_t replicas);

} // namespace spectral
