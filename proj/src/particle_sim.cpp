#include "spectral/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace spectral {

namespace {

constexpr double kAbsDurationFloor = 1e-280;
constexpr std::size_t kMaxConsecutiveRejections = 500000;

double pair_numerator(const InteractionKernel& kernel, double xi, double xj)
{
    switch (kernel.kind()) {
    case InteractionKernel::Kind::Dyson: return 1.0;
    case InteractionKernel::Kind::Wishart: return xi + xj;
    case InteractionKernel::Kind::General: return kernel.f(xi, xj);
    }
    return 0.0;
}

// Raw interaction sums R_i = (1/N) sum_{j != i} f(l_i, l_j)/(l_i - l_j);
// the drift displacement over a step a is a * R_i up to the adjacent-pair
// taming below.  This is the O(N^2) part and is reused for every sub-step
// attempted at the same state.
void raw_pair_sums(const std::vector<double>& lam, const SdeConfig& cfg,
                   std::vector<double>& sums)
{
    const std::size_t n = lam.size();
    const double fn = static_cast<double>(n);
    std::fill(sums.begin(), sums.end(), 0.0);
    switch (cfg.kernel.kind()) {
    case InteractionKernel::Kind::Dyson:
        for (std::size_t j = 0; j < n; ++j) {
            const double lj = lam[j];
            for (std::size_t i = j + 1; i < n; ++i) {
                const double d = lam[i] - lj;
                if (d == 0.0) throw collision_error("duplicate positions in drift evaluation");
                const double inv = 1.0 / d;
                sums[i] += inv;
                sums[j] -= inv;
            }
        }
        break;
    case InteractionKernel::Kind::Wishart:
        for (std::size_t j = 0; j < n; ++j) {
            const double lj = lam[j];
            for (std::size_t i = j + 1; i < n; ++i) {
                const double d = lam[i] - lj;
                if (d == 0.0) throw collision_error("duplicate positions in drift evaluation");
                const double r = (lam[i] + lj) / d;
                sums[i] += r;
                sums[j] -= r;
            }
        }
        break;
    case InteractionKernel::Kind::General:
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = j + 1; i < n; ++i) {
                const double d = lam[i] - lam[j];
                if (d == 0.0) throw collision_error("duplicate positions in drift evaluation");
                const double r = cfg.kernel.f(lam[i], lam[j]) / d;
                sums[i] += r;
                sums[j] -= r;
            }
        }
        break;
    }
    for (auto& v : sums) v /= fn;
}

// Drift displacements over a step of length a.  Adjacent pairs replace the
// raw Euler term f a/(N d) by the exact two-body separation of
// dg/dt = 2f/(N g), i.e. each member moves (sqrt(d^2 + 4 f a/N) - d)/2 =
// 2 f a / (N (sqrt(d^2 + 4 f a/N) + d)); this agrees with the raw term to
// first order in a and stays bounded as d -> 0, so near-touching pairs
// cannot overshoot.  O(N) given the cached raw sums.
void assemble_displacements(const std::vector<double>& lam, const std::vector<double>& raw,
                            const SdeConfig& cfg, double a, std::vector<double>& disp)
{
    const std::size_t n = lam.size();
    const double fn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) disp[i] = a * raw[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double f = pair_numerator(cfg.kernel, lam[i + 1], lam[i]);
        if (f < 0) continue;
        const double d = lam[i + 1] - lam[i];
        const double x = 4 * f * a / fn;
        const double tamed = x / (2 * (std::sqrt(d * d + x) + d));
        const double correction = tamed - f * a / (fn * d);
        disp[i + 1] += correction;
        disp[i] -= correction;
    }
    if (cfg.drift)
        for (std::size_t i = 0; i < n; ++i) disp[i] += cfg.drift->B(lam[i]) * a;
}

struct Proposal {
    bool ok;
    std::size_t pair; // first offending index on failure
};

// Candidate positions plus the acceptance tests: strict ordering and Wishart
// positivity.  The tamed pair displacements cannot overshoot, and noise
// kicks are exact Brownian increments, so only actual crossings reject.
Proposal propose(const std::vector<double>& lam, const std::vector<double>& disp,
                 const std::vector<double>& inc, double noise_coef_const,
                 const SdeConfig& cfg, std::vector<double>& out)
{
    const std::size_t n = lam.size();
    const bool wishart = cfg.kernel.kind() == InteractionKernel::Kind::Wishart;
    for (std::size_t i = 0; i < n; ++i) {
        const double coef =
            wishart ? noise_coef_const * std::sqrt(std::max(lam[i], 0.0)) : noise_coef_const;
        out[i] = lam[i] + disp[i] + coef * inc[i];
    }
    if (wishart && !(out[0] > 0.0)) return {false, 0};
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(out[i + 1] > out[i])) return {false, i};
    return {true, 0};
}

// One-time step-size seed for the start of an advance: near-coincident
// clusters (the jittered starts) need the first sub-steps to resolve the
// local drift scale, otherwise the superposed pair displacements inflate the
// cluster; afterwards merge_cap grows back towards dt on its own.
double initial_step_scale(const std::vector<double>& lam, const SdeConfig& cfg)
{
    const std::size_t n = lam.size();
    std::vector<double> raw(n, 0.0);
    raw_pair_sums(lam, cfg, raw);
    double dt = cfg.dt;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = lam[i + 1] - lam[i];
        const double speed = std::max(std::abs(raw[i]), std::abs(raw[i + 1]));
        if (speed > 0) dt = std::min(dt, cfg.gap_safety * gap / speed);
    }
    if (cfg.kernel.kind() == InteractionKernel::Kind::Wishart && std::abs(raw[0]) > 0)
        dt = std::min(dt, cfg.gap_safety * lam[0] / std::abs(raw[0]));
    return std::max(dt, kAbsDurationFloor);
}

struct Segment {
    double dur;
    std::vector<double> inc;
};

class PathIntegrator {
public:
    PathIntegrator(const SdeConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {}

    // advance `lam` (and optionally a coupled `lam2` sharing the increments)
    // by `span` time units
    void advance(std::vector<double>& lam, std::vector<double>* lam2, double span,
                 double* worst_excess)
    {
        if (span <= 0) return;
        const std::size_t n = lam.size();
        const double noise_coef = cfg_.resolved_noise(n);
        std::vector<double> disp(n), disp2(n), prop(n), prop2(n);
        std::vector<double> raw(n), raw2(n);
        bool raw_valid = false;
        double done = 0.0;
        double merge_cap = initial_step_scale(lam, cfg_);
        if (lam2) merge_cap = std::min(merge_cap, initial_step_scale(*lam2, cfg_));
        std::size_t consecutive_rej = 0;

        while (done < span - 1e-15 * std::max(1.0, span) || !stack_.empty()) {
            const double want = std::min(cfg_.dt, merge_cap);
            if (stack_.empty()) {
                const double a0 = std::min(want, span - done);
                stack_.push_back({a0, draw(a0, n)});
            }
            while (stack_.back().dur > want * 1.0001) split_top();
            while (stack_.size() >= 2
                   && stack_[stack_.size() - 1].dur + stack_[stack_.size() - 2].dur
                          <= std::min(want, span - done) * 1.0001)
                merge_top();

            Segment& seg = stack_.back();
            if (!raw_valid) {
                raw_pair_sums(lam, cfg_, raw);
                if (lam2) raw_pair_sums(*lam2, cfg_, raw2);
                raw_valid = true;
            }
            assemble_displacements(lam, raw, cfg_, seg.dur, disp);
            Proposal r1 = propose(lam, disp, seg.inc, noise_coef, cfg_, prop);
            Proposal r2{true, 0};
            if (lam2 && r1.ok) {
                assemble_displacements(*lam2, raw2, cfg_, seg.dur, disp2);
                r2 = propose(*lam2, disp2, seg.inc, noise_coef, cfg_, prop2);
            }

            if (r1.ok && r2.ok) {
                raw_valid = false;
                lam.swap(prop);
                if (lam2) {
                    lam2->swap(prop2);
                    if (worst_excess)
                        for (std::size_t i = 0; i < n; ++i)
                            *worst_excess = std::max(*worst_excess, lam[i] - (*lam2)[i]);
                }
                done += seg.dur;
                stack_.pop_back();
                merge_cap = std::min(2 * merge_cap, cfg_.dt);
                consecutive_rej = 0;
            } else {
                ++consecutive_rej;
                const std::size_t pair = r1.ok ? r2.pair : r1.pair;
                if (seg.dur < kAbsDurationFloor || consecutive_rej > kMaxConsecutiveRejections) {
                    char msg[128];
                    std::snprintf(msg, sizeof(msg),
                                  "stiffness: step refinement exhausted near pair (%zu, %zu)",
                                  pair, pair + 1);
                    throw stiffness_error(msg, pair, pair + 1);
                }
                merge_cap = seg.dur / 2;
                split_top();
            }
        }
    }

private:
    std::vector<double> draw(double a, std::size_t n)
    {
        std::vector<double> inc(n, 0.0);
        if (cfg_.resolved_noise(n) == 0.0) return inc;
        const double s = std::sqrt(a);
        for (auto& v : inc) v = s * normal_(rng_);
        return inc;
    }

    void split_top()
    {
        Segment seg = std::move(stack_.back());
        stack_.pop_back();
        const std::size_t n = seg.inc.size();
        Segment first{seg.dur / 2, std::vector<double>(n)};
        Segment second{seg.dur / 2, std::vector<double>(n)};
        const double s = std::sqrt(seg.dur) / 2; // bridge: halves ~ N(inc/2, dur/4)
        const bool noiseless = cfg_.resolved_noise(n) == 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = noiseless ? 0.0 : s * normal_(rng_);
            first.inc[i] = seg.inc[i] / 2 + z;
            second.inc[i] = seg.inc[i] / 2 - z;
        }
        stack_.push_back(std::move(second));
        stack_.push_back(std::move(first));
    }

    void merge_top()
    {
        Segment a = std::move(stack_.back());
        stack_.pop_back();
        Segment& b = stack_.back();
        b.dur += a.dur;
        for (std::size_t i = 0; i < a.inc.size(); ++i) b.inc[i] += a.inc[i];
    }

    const SdeConfig& cfg_;
    std::mt19937_64& rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<Segment> stack_;
};

void check_record_times(const std::vector<double>& record_times, double t_end)
{
    double prev = 0.0;
    for (double t : record_times) {
        if (t < prev - 1e-15 || t > t_end + 1e-12)
            throw std::invalid_argument("record_times must be increasing within [0, t_end]");
        prev = t;
    }
}

} // namespace

double SdeConfig::resolved_noise(std::size_t n) const
{
    const double nd = static_cast<double>(n);
    switch (kernel.kind()) {
    case InteractionKernel::Kind::Wishart:
        return noise_scale >= 0 ? noise_scale : 2.0 / nd;
    case InteractionKernel::Kind::General:
        if (epsilon_N >= 0) return epsilon_N;
        [[fallthrough]];
    case InteractionKernel::Kind::Dyson:
        return noise_scale >= 0 ? noise_scale : 1.0 / std::sqrt(nd);
    }
    return 0.0;
}

void SdeConfig::validate(const OrderedSpectrum& initial) const
{
    if (N < 2) throw std::invalid_argument("SdeConfig: N >= 2 required");
    if (initial.count() != N) throw std::invalid_argument("SdeConfig: initial count != N");
    if (!(dt > 0)) throw std::invalid_argument("SdeConfig: dt must be positive");
    if (!(t_end > 0)) throw std::invalid_argument("SdeConfig: t_end must be positive");
    if (!(gap_safety > 0) || gap_safety > 1.0)
        throw std::invalid_argument("SdeConfig: gap_safety must lie in (0, 1]");
    if (!initial.strictly_increasing())
        throw std::invalid_argument("SdeConfig: initial positions must be strictly increasing");
    if (kernel.kind() == InteractionKernel::Kind::Wishart) {
        if (!(kernel.wishart_c() >= 1.0))
            throw std::invalid_argument("SdeConfig: Wishart requires c = m/n >= 1");
        if (!(initial[0] > 0))
            throw std::invalid_argument("SdeConfig: Wishart requires positive initial positions");
    }
}

double drift_dyson(const OrderedSpectrum& s, std::size_t i)
{
    const auto& lam = s.positions();
    const double n = static_cast<double>(lam.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < lam.size(); ++j) {
        if (j == i) continue;
        const double d = lam[i] - lam[j];
        if (d == 0.0) throw collision_error("drift_dyson: duplicate positions");
        acc += 1.0 / d;
    }
    return acc / n;
}

double drift_wishart(const OrderedSpectrum& s, std::size_t i, double c)
{
    const auto& lam = s.positions();
    if (lam[i] <= 0) throw std::domain_error("drift_wishart: nonpositive position");
    const double n = static_cast<double>(lam.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < lam.size(); ++j) {
        if (j == i) continue;
        if (lam[j] <= 0) throw std::domain_error("drift_wishart: nonpositive position");
        const double d = lam[i] - lam[j];
        if (d == 0.0) throw collision_error("drift_wishart: duplicate positions");
        acc += (lam[i] + lam[j]) / d;
    }
    return c + acc / n;
}

double drift_general(const OrderedSpectrum& s, std::size_t i, const InteractionKernel& kernel)
{
    const auto& lam = s.positions();
    const double n = static_cast<double>(lam.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < lam.size(); ++j) {
        if (j == i) continue;
        const double d = lam[i] - lam[j];
        if (d == 0.0) throw collision_error("drift_general: duplicate positions");
        acc += kernel.f(lam[i], lam[j]) / d;
    }
    return acc / n;
}

OrderedSpectrum step(const OrderedSpectrum& s, const SdeConfig& cfg,
                     const std::vector<double>& gaussians, double dt_local,
                     std::mt19937_64& bridge_rng)
{
    if (gaussians.size() != s.count())
        throw std::invalid_argument("step: need one gaussian per particle");
    if (!(dt_local > 0) || dt_local > cfg.dt * (1 + 1e-12))
        throw std::invalid_argument("step: dt_local must lie in (0, cfg.dt]");

    std::vector<double> lam = s.positions();
    const double noise_coef = cfg.resolved_noise(lam.size());
    std::vector<double> disp(lam.size()), prop(lam.size());
    std::normal_distribution<double> normal(0.0, 1.0);

    // pending (duration, increment) segments of the given Brownian step
    std::vector<Segment> stack;
    {
        Segment all{dt_local, std::vector<double>(lam.size())};
        const double sq = std::sqrt(dt_local);
        for (std::size_t i = 0; i < lam.size(); ++i) all.inc[i] = sq * gaussians[i];
        stack.push_back(std::move(all));
    }
    const double floor = dt_local * std::pow(2.0, -40);
    std::vector<double> raw(lam.size());
    bool raw_valid = false;
    while (!stack.empty()) {
        Segment& seg = stack.back();
        if (!raw_valid) {
            raw_pair_sums(lam, cfg, raw);
            raw_valid = true;
        }
        assemble_displacements(lam, raw, cfg, seg.dur, disp);
        Proposal r = propose(lam, disp, seg.inc, noise_coef, cfg, prop);
        if (r.ok) {
            lam.swap(prop);
            raw_valid = false;
            stack.pop_back();
            continue;
        }
        if (seg.dur / 2 < floor) {
            char msg[128];
            std::snprintf(msg, sizeof(msg),
                          "stiffness: dt underflow near pair (%zu, %zu)", r.pair, r.pair + 1);
            throw stiffness_error(msg, r.pair, r.pair + 1);
        }
        Segment whole = std::move(stack.back());
        stack.pop_back();
        Segment first{whole.dur / 2, std::vector<double>(lam.size())};
        Segment second{whole.dur / 2, std::vector<double>(lam.size())};
        const double sq = std::sqrt(whole.dur) / 2;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            const double z = sq * normal(bridge_rng);
            first.inc[i] = whole.inc[i] / 2 + z;
            second.inc[i] = whole.inc[i] / 2 - z;
        }
        stack.push_back(std::move(second));
        stack.push_back(std::move(first));
    }
    return OrderedSpectrum(std::move(lam));
}

OrderedSpectrum cluster_start(std::size_t n, double x0, double eta)
{
    std::vector<double> pos(n);
    for (std::size_t i = 0; i < n; ++i)
        pos[i] = x0 + eta * static_cast<double>(i) / static_cast<double>(n);
    return OrderedSpectrum(std::move(pos));
}

Trajectory simulate(const SdeConfig& cfg, const OrderedSpectrum& initial,
                    const std::vector<double>& record_times)
{
    cfg.validate(initial);
    check_record_times(record_times, cfg.t_end);

    std::mt19937_64 rng(cfg.seed);
    PathIntegrator integrator(cfg, rng);

    Trajectory traj;
    traj.config = cfg;
    std::vector<double> lam = initial.positions();
    double t = 0.0;
    for (double tr : record_times) {
        integrator.advance(lam, nullptr, tr - t, nullptr);
        t = tr;
        traj.times.push_back(tr);
        traj.snapshots.emplace_back(lam);
    }
    return traj;
}

CoupledRun coupled_dominance_run(const SdeConfig& cfg, const OrderedSpectrum& s1,
                                 const OrderedSpectrum& s2,
                                 const std::vector<double>& record_times, double tol_K)
{
    cfg.validate(s1);
    cfg.validate(s2);
    if (s1.count() != s2.count())
        throw std::invalid_argument("coupled_dominance_run: equal counts required");
    if (!dominates(s1, s2))
        throw std::invalid_argument("coupled_dominance_run: requires dominates(s1, s2)");
    check_record_times(record_times, cfg.t_end);

    std::mt19937_64 rng(cfg.seed);
    PathIntegrator integrator(cfg, rng);

    CoupledRun run;
    run.first.config = cfg;
    run.second.config = cfg;
    run.report.tol = tol_K * cfg.dt;

    std::vector<double> a = s1.positions(), b = s2.positions();
    double t = 0.0;
    for (double tr : record_times) {
        integrator.advance(a, &b, tr - t, &run.report.worst_excess);
        t = tr;
        run.first.times.push_back(tr);
        run.second.times.push_back(tr);
        run.first.snapshots.emplace_back(a);
        run.second.snapshots.emplace_back(b);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] > b[i] + run.report.tol)
                run.report.violations.push_back({tr, i, a[i] - b[i]});
    }
    return run;
}

std::vector<OrderedSpectrum> ensemble_finals(const SdeConfig& cfg, const OrderedSpectrum& initial,
                                             std::size_t replicas)
{
    std::vector<OrderedSpectrum> finals;
    finals.reserve(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        SdeConfig c = cfg;
        c.seed = cfg.seed ^ static_cast<std::uint64_t>(r);
        auto traj = simulate(c, initial, {cfg.t_end});
        finals.push_back(traj.snapshots.back());
    }
    return finals;
}

void Trajectory::write_csv(std::ostream& os) const
{
    os << "t,i,lambda\n";
    char buf[96];
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& pos = snapshots[k].positions();
        for (std::size_t i = 0; i < pos.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g", times[k], i, pos[i]);
            os << buf << '\n';
        }
    }
}

void Trajectory::write_meta(std::ostream& os) const
{
    const char* kind = "dyson";
    if (config.kernel.kind() == InteractionKernel::Kind::Wishart) kind = "wishart";
    if (config.kernel.kind() == InteractionKernel::Kind::General) kind = "general";
    os << "kernel=" << kind << '\n'
       << "N=" << config.N << '\n'
       << "dt=" << config.dt << '\n'
       << "t_end=" << config.t_end << '\n'
       << "noise_scale=" << config.resolved_noise(config.N) << '\n'
       << "epsilon_N=" << config.epsilon_N << '\n'
       << "gap_safety=" << config.gap_safety << '\n'
       << "seed=" << config.seed << '\n'
       << "drift=" << (config.drift ? "present" : "none") << '\n';
    if (config.kernel.kind() == InteractionKernel::Kind::Wishart)
        os << "c=" << config.kernel.wishart_c() << '\n';
}

} // namespace spectral
