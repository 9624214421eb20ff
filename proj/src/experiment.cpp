#include "spectral/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "spectral/expression.hpp"
#include "spectral/laws_metrics.hpp"
#include "spectral/matrix_lab.hpp"
#include "spectral/particle_sim.hpp"
#include "spectral/pde_solver.hpp"
#include "spectral/svg_plot.hpp"

namespace spectral {

const char* kToolVersion = "0.1.0";

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::uint64_t fnv1a(const std::string& data)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct KernelSetup {
    InteractionKernel kernel = InteractionKernel::dyson();
    std::string kind = "dyson";
    double c = 0.0;
};

KernelSetup build_kernel(const ExperimentConfig& cfg)
{
    KernelSetup ks;
    ks.kind = cfg.get("kernel.kind", "dyson");
    if (ks.kind == "dyson") {
        ks.kernel = InteractionKernel::dyson();
    } else if (ks.kind == "wishart") {
        ks.c = cfg.get_num("kernel.c", 2.0);
        ks.kernel = InteractionKernel::wishart(ks.c);
    } else if (ks.kind == "general") {
        const double C = cfg.get_num("kernel.lipschitz_C", 64.0);
        const double a0 = cfg.get_num("kernel.alpha0", 1.0);
        const double xbox = cfg.get_num("kernel.xbox", 5.0);
        const double zbox = cfg.get_num("kernel.zbox", 2.0);
        if (cfg.has("kernel.sigma")) {
            Expression se = Expression::parse(cfg.get("kernel.sigma", ""));
            auto sigma = [se](double x) { return se.eval(x); };
            auto sigma_prime = [se](double x) {
                const double d = 1e-6;
                return (se.eval(x + d) - se.eval(x - d)) / (2 * d);
            };
            ks.kernel = InteractionKernel::sigma_product(sigma, sigma_prime, C, a0, xbox, zbox);
        } else {
            Expression fe = Expression::parse(cfg.get("kernel.f", "1"));
            Expression ge = Expression::parse(cfg.get("kernel.g", "1"));
            ks.kernel = InteractionKernel::general(
                [fe](double x, double y) { return fe.eval(x, y); },
                [ge](double x, double z) { return ge.eval(x, 0, z); }, C, a0, xbox, zbox);
        }
    } else {
        throw config_error("unknown kernel.kind: " + ks.kind);
    }
    return ks;
}

std::optional<DriftField> build_drift(const ExperimentConfig& cfg)
{
    if (!cfg.has("params.drift")) return std::nullopt;
    Expression be = Expression::parse(cfg.get("params.drift", "0"));
    const double c0 = cfg.get_num("params.drift_c0", 1.0);
    return DriftField::validated([be](double x) { return be.eval(x); }, c0);
}

SdeConfig build_sde(const ExperimentConfig& cfg, const KernelSetup& ks, std::uint64_t seed)
{
    SdeConfig sde;
    sde.kernel = ks.kernel;
    sde.N = static_cast<std::size_t>(cfg.get_num("params.N", 100));
    sde.dt = cfg.get_num("params.dt", 1e-3);
    sde.t_end = cfg.get_num("params.t_end", 1.0);
    sde.seed = seed;
    if (cfg.has("params.noise_scale")) sde.noise_scale = cfg.get_num("params.noise_scale", -1);
    if (cfg.has("params.epsilon_N")) sde.epsilon_N = cfg.get_num("params.epsilon_N", -1);
    sde.gap_safety = cfg.get_num("params.gap_safety", 0.4);
    sde.drift = build_drift(cfg);
    return sde;
}

OrderedSpectrum build_initial(const ExperimentConfig& cfg, const SdeConfig& sde)
{
    const bool wishart = sde.kernel.kind() == InteractionKernel::Kind::Wishart;
    const double x0 = cfg.get_num("params.x0", 0.0);
    const double eta = cfg.get_num("params.eta", 1e-6);
    if (cfg.has("params.initial_csv")) {
        std::ifstream is(cfg.get("params.initial_csv", ""));
        if (!is) throw config_error("cannot open params.initial_csv");
        std::string line;
        std::getline(is, line);
        std::vector<double> pos;
        while (std::getline(is, line))
            if (!trim(line).empty()) pos.push_back(std::stod(line));
        return OrderedSpectrum::from_unsorted(std::move(pos));
    }
    if (wishart) {
        std::vector<double> pos(sde.N);
        for (std::size_t i = 0; i < sde.N; ++i)
            pos[i] = std::max(x0, 0.0) + eta * static_cast<double>(i + 1) / static_cast<double>(sde.N);
        return OrderedSpectrum(std::move(pos));
    }
    return cluster_start(sde.N, x0, eta);
}

std::vector<double> record_times_or(const ExperimentConfig& cfg, double t_end)
{
    auto rt = cfg.get_list("params.record_times");
    if (rt.empty()) rt.push_back(t_end);
    return rt;
}

void write_meta(const fs::path& dir, const ExperimentConfig& cfg, std::uint64_t seed)
{
    std::ofstream os(dir / "run.meta");
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(cfg.raw())));
    os << "tool=spectral-flow\n"
       << "version=" << kToolVersion << '\n'
       << "config=" << cfg.name() << '\n'
       << "config_hash=" << hash << '\n'
       << "experiment=" << cfg.experiment() << '\n'
       << "seed=" << seed << '\n';
    for (const auto& [k, v] : cfg.entries()) os << k << '=' << v << '\n';
}

void append_meta(const fs::path& dir, const std::string& key, const std::string& value)
{
    std::ofstream os(dir / "run.meta", std::ios::app);
    os << key << '=' << value << '\n';
}

GridSpec grid_from(const ExperimentConfig& cfg, double def_lo, double def_hi, double def_h)
{
    const double lo = cfg.get_num("params.grid_lo", def_lo);
    const double hi = cfg.get_num("params.grid_hi", def_hi);
    const double h = cfg.get_num("params.h", def_h);
    const auto n = static_cast<std::size_t>(std::lround((hi - lo) / h)) + 1;
    return GridSpec(lo, hi, n);
}

PlotSeries cdf_series(const std::string& label, const GridCDF& f)
{
    PlotSeries s;
    s.label = label;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s.x.push_back(f.x(i));
        s.y.push_back(f[i]);
    }
    return s;
}

void write_spectrum(const fs::path& p, const OrderedSpectrum& s)
{
    std::ofstream os(p);
    s.write_csv(os);
}

// ---------------------------------------------------------------- runners

void run_simulate_sde(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t seed,
                      bool plots)
{
    auto ks = build_kernel(cfg);
    auto sde = build_sde(cfg, ks, seed);
    auto initial = build_initial(cfg, sde);
    auto rt = record_times_or(cfg, sde.t_end);
    auto traj = simulate(sde, initial, rt);
    {
        std::ofstream os(dir / "trajectory.csv");
        traj.write_csv(os);
    }
    {
        std::ofstream os(dir / "trajectory.meta");
        traj.write_meta(os);
    }
    write_spectrum(dir / "final_spectrum.csv", traj.snapshots.back());
    if (plots) {
        const auto& fin = traj.snapshots.back();
        const double lo = fin.positions().front(), hi = fin.positions().back();
        const double pad = 0.05 * (hi - lo) + 1e-6;
        GridSpec g(lo - pad, hi + pad, 257);
        write_svg_chart((dir / "final_cdf.svg").string(), "final empirical CDF",
                        {cdf_series("F_N", empirical_cdf(fin, g))});
    }
}

void run_simulate_matrix(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t seed,
                         bool plots)
{
    const std::string kind = cfg.get("params.matrix", "symmetric-bm");
    const int n = static_cast<int>(cfg.get_num("params.n", 100));
    const double dt = cfg.get_num("params.dt", 0.05);
    const double t_end = cfg.get_num("params.t_end", 1.0);
    const auto replicas = static_cast<std::size_t>(cfg.get_num("params.replicas", 1));

    std::vector<OrderedSpectrum> finals;
    for (std::size_t r = 0; r < replicas; ++r) {
        const std::uint64_t rs = seed ^ static_cast<std::uint64_t>(r);
        SymMatrixPath path;
        if (kind == "symmetric-bm") {
            path = simulate_symmetric_bm(n, dt, t_end, rs, cfg.get_num("params.scale", 1.0));
        } else if (kind == "wishart") {
            WishartConfig wc;
            wc.n = n;
            wc.m = static_cast<int>(cfg.get_num("params.m", 2 * n));
            wc.dt = dt;
            wc.seed = rs;
            path = simulate_wishart_path(wc, t_end);
        } else if (kind == "sigma") {
            Expression se = Expression::parse(cfg.get("params.sigma", "1"));
            path = simulate_sigma_diffusion(n, [se](double x) { return se.eval(x); }, dt,
                                            t_end, rs);
        } else {
            throw config_error("unknown params.matrix: " + kind);
        }
        finals.push_back(eigenvalues(path.final()));
        char name[48];
        std::snprintf(name, sizeof(name), "spectrum_r%03zu.csv", r);
        write_spectrum(dir / name, finals.back());
    }
    if (plots) {
        double lo = 1e300, hi = -1e300;
        for (const auto& s : finals) {
            lo = std::min(lo, s.positions().front());
            hi = std::max(hi, s.positions().back());
        }
        const double pad = 0.05 * (hi - lo) + 1e-6;
        GridSpec g(lo - pad, hi + pad, 257);
        write_svg_chart((dir / "avg_cdf.svg").string(), "replica-averaged eigenvalue CDF",
                        {cdf_series("F", average_empirical_cdf(finals, g))});
    }
}

GridCDF build_f0(const ExperimentConfig& cfg, const GridSpec& grid)
{
    const std::string init = cfg.get("params.init", "step");
    if (init == "step") {
        const double x0 = cfg.get_num("params.x0", 0.0);
        std::vector<double> v(grid.n, 0.0);
        for (std::size_t i = 0; i < grid.n; ++i)
            if (grid.x(i) >= x0) v[i] = 1.0;
        return GridCDF(grid, std::move(v), 1.0);
    }
    if (init == "semicircle") {
        auto law = AnalyticLaw::semicircle(cfg.get_num("params.t0", 1.0),
                                           cfg.get_num("params.radius_coeff", 2.0));
        return law_cdf(law, grid);
    }
    if (init == "mp") {
        auto law = AnalyticLaw::marchenko_pastur(cfg.get_num("params.sigma0", 1.0),
                                                 cfg.get_num("params.c", 2.0),
                                                 cfg.get_num("params.edge_coeff", 2.0));
        return law_cdf(law, grid);
    }
    if (init == "csv") {
        std::ifstream is(cfg.get("params.init_csv", ""));
        if (!is) throw config_error("cannot open params.init_csv");
        return GridCDF::read_csv(is);
    }
    throw config_error("unknown params.init: " + init);
}

void run_solve_pde(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t, bool plots)
{
    auto ks = build_kernel(cfg);
    const bool wishart = ks.kind == "wishart";
    GridSpec grid = grid_from(cfg, wishart ? 0.0 : -4.0, wishart ? 8.0 : 4.0, 1.0 / 100);

    SchemeParams p;
    p.grid = grid;
    p.kernel = ks.kernel;
    p.dt = cfg.get_num("params.dt", grid.h());
    p.eps_smooth = cfg.get_num("params.eps_smooth", 1e-3);
    if (cfg.has("params.eps_kernel")) p.eps_kernel = cfg.get_num("params.eps_kernel", -1);
    p.cfl_safety = cfg.get_num("params.cfl_safety", 0.45);
    p.drift = build_drift(cfg);
    p.wishart_c = ks.c;

    const double t_end = cfg.get_num("params.t_end", 1.0);
    auto rt = record_times_or(cfg, t_end);
    GridCDF f0 = build_f0(cfg, grid);
    auto [snaps, report] = solve(f0, t_end, p, rt);

    std::vector<PlotSeries> series{cdf_series("F0", f0)};
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        char name[48];
        std::snprintf(name, sizeof(name), "snapshot_%03zu.csv", k);
        std::ofstream os(dir / name);
        snaps[k].write_csv(os);
        char label[32];
        std::snprintf(label, sizeof(label), "t=%.4g", rt[k]);
        series.push_back(cdf_series(label, snaps[k]));
    }
    {
        std::ofstream os(dir / "solve_report.csv");
        report.write_trace_csv(os);
    }
    if (plots) write_svg_chart((dir / "snapshots.svg").string(), "PDE snapshots", series);
}

void run_converge_n(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t seed,
                    bool plots)
{
    auto ns = cfg.get_list("params.Ns");
    if (ns.empty()) ns = {50, 100, 200, 400};
    const auto seeds = static_cast<std::size_t>(cfg.get_num("params.seeds", 10));
    const double t_end = cfg.get_num("params.t_end", 1.0);

    GridSpec grid = grid_from(cfg, -4.0, 4.0, 1.0 / 200);
    SchemeParams p;
    p.grid = grid;
    p.kernel = InteractionKernel::dyson();
    p.dt = cfg.get_num("params.dt_pde", grid.h());
    GridCDF f_pde = [&] {
        std::vector<double> v(grid.n, 0.0);
        for (std::size_t i = 0; i < grid.n; ++i)
            if (grid.x(i) >= 0) v[i] = 1.0;
        GridCDF f0(grid, std::move(v), 1.0);
        return solve(f0, t_end, p, {t_end}).first.back();
    }();

    std::ofstream table(dir / "converge.csv");
    table << "N,mean_ks\n";
    std::vector<double> ks_means;
    for (double nd : ns) {
        const auto n = static_cast<std::size_t>(nd);
        double acc = 0.0;
        for (std::size_t s = 0; s < seeds; ++s) {
            SdeConfig sde;
            sde.kernel = InteractionKernel::dyson();
            sde.N = n;
            sde.dt = cfg.get_num("params.dt", 1e-3);
            sde.t_end = t_end;
            sde.seed = seed ^ (s * 1000 + n);
            auto traj = simulate(sde, cluster_start(n), {t_end});
            acc += ks_distance(empirical_cdf(traj.snapshots.back(), grid), f_pde);
        }
        ks_means.push_back(acc / static_cast<double>(seeds));
        char row[64];
        std::snprintf(row, sizeof(row), "%zu,%.17g", n, ks_means.back());
        table << row << '\n';
    }
    bool monotone = true;
    for (std::size_t i = 1; i < ks_means.size(); ++i)
        if (ks_means[i] > ks_means[i - 1]) monotone = false;
    append_meta(dir, "ks_monotone_decreasing", monotone ? "true" : "false");
    append_meta(dir, "final_ks", std::to_string(ks_means.back()));
    if (plots) {
        PlotSeries s{"KS(F_N, F_PDE)", ns, ks_means};
        write_svg_chart((dir / "converge.svg").string(), "convergence in N", {s});
    }
}

void run_dominance(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t seed, bool)
{
    const auto runs = static_cast<std::size_t>(cfg.get_num("params.runs", 20));
    const auto n = static_cast<std::size_t>(cfg.get_num("params.N", 50));
    SdeConfig sde;
    sde.kernel = InteractionKernel::dyson();
    sde.N = n;
    sde.dt = cfg.get_num("params.dt", 1e-4);
    sde.t_end = cfg.get_num("params.t_end", 1.0);
    const double tol_K = cfg.get_num("params.tol_K", 10.0);

    std::ofstream table(dir / "dominance.csv");
    table << "run,violations,worst_excess\n";
    std::size_t total = 0;
    double worst = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
        std::mt19937_64 rng(seed ^ (r * 7919));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> up(0.0, 0.5);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = u(rng);
        std::sort(a.begin(), a.end());
        for (std::size_t i = 0; i < n; ++i) b[i] = a[i] + up(rng);
        std::sort(b.begin(), b.end());
        sde.seed = seed ^ (r * 104729);
        auto run = coupled_dominance_run(sde, OrderedSpectrum(a), OrderedSpectrum(b),
                                         {sde.t_end}, tol_K);
        total += run.report.violations.size();
        worst = std::max(worst, run.report.worst_excess);
        char row[96];
        std::snprintf(row, sizeof(row), "%zu,%zu,%.17g", r, run.report.violations.size(),
                      run.report.worst_excess);
        table << row << '\n';
    }
    append_meta(dir, "total_violations", std::to_string(total));
    append_meta(dir, "worst_excess", std::to_string(worst));
}

void run_contraction(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t seed, bool)
{
    const auto pairs = static_cast<std::size_t>(cfg.get_num("params.pairs", 20));
    const auto n = static_cast<std::size_t>(cfg.get_num("params.N", 20));
    SdeConfig sde;
    sde.kernel = InteractionKernel::dyson();
    sde.N = n;
    sde.dt = cfg.get_num("params.dt", 1e-3);
    sde.t_end = cfg.get_num("params.t_end", 0.5);
    sde.noise_scale = 0.0; // deterministic flow

    std::ofstream table(dir / "contraction.csv");
    table << "pair,p,before,after\n";
    const double ps[3] = {1.0, 2.0, INFINITY};
    for (std::size_t r = 0; r < pairs; ++r) {
        std::mt19937_64 rng(seed ^ (r * 31337));
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = u(rng);
        for (std::size_t i = 0; i < n; ++i) b[i] = u(rng);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        auto enforce_gap = [](std::vector<double>& v) {
            for (std::size_t i = 1; i < v.size(); ++i)
                v[i] = std::max(v[i], v[i - 1] + 0.02);
        };
        enforce_gap(a);
        enforce_gap(b);
        sde.seed = seed ^ r;
        auto ta = simulate(sde, OrderedSpectrum(a), {sde.t_end});
        auto tb = simulate(sde, OrderedSpectrum(b), {sde.t_end});
        for (double p : ps) {
            auto lp = [&](const std::vector<double>& x, const std::vector<double>& y) {
                double acc = 0.0, mx = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    const double d = std::abs(x[i] - y[i]);
                    mx = std::max(mx, d);
                    acc += std::isinf(p) ? 0.0 : std::pow(d, p);
                }
                return std::isinf(p) ? mx : std::pow(acc / static_cast<double>(x.size()), 1.0 / p);
            };
            const double before = lp(a, b);
            const double after =
                lp(ta.snapshots.back().positions(), tb.snapshots.back().positions());
            char row[120];
            std::snprintf(row, sizeof(row), "%zu,%g,%.17g,%.17g", r, p, before, after);
            table << row << '\n';
        }
    }
}

void run_dirac_selection(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t,
                         bool plots)
{
    GridSpec grid = grid_from(cfg, -4.0, 4.0, 1.0 / 200);
    SchemeParams p;
    p.grid = grid;
    p.kernel = InteractionKernel::dyson();
    p.dt = cfg.get_num("params.dt", grid.h());
    const double t_probe = cfg.get_num("params.t_probe", 1.0);
    GridCDF f = dirac_selection_test(p, t_probe);
    {
        std::ofstream os(dir / "final.csv");
        f.write_csv(os);
    }
    const double rc = cfg.get_num("params.radius_coeff", 2.0);
    GridCDF ref = law_cdf(AnalyticLaw::semicircle(t_probe, rc), grid);
    std::vector<double> step(grid.n, 0.0);
    for (std::size_t i = 0; i < grid.n; ++i)
        if (grid.x(i) >= 0) step[i] = 1.0;
    GridCDF fstep(grid, std::move(step), 1.0);
    append_meta(dir, "sup_to_semicircle", std::to_string(ks_distance(f, ref)));
    append_meta(dir, "sup_to_frozen_step", std::to_string(ks_distance(f, fstep)));
    if (plots)
        write_svg_chart((dir / "dirac.svg").string(), "step initial datum at t_probe",
                        {cdf_series("F", f), cdf_series("semicircle", ref)});
}

void run_calibrate(const ExperimentConfig& cfg, const fs::path& dir, std::uint64_t seed, bool)
{
    const std::string family = cfg.get("params.family", "semicircle");
    const auto replicas = static_cast<std::size_t>(cfg.get_num("params.replicas", 10));
    const double t_end = cfg.get_num("params.t_end", 1.0);
    std::ofstream os(dir / "calibration.txt");
    if (family == "semicircle") {
        SdeConfig sde;
        sde.kernel = InteractionKernel::dyson();
        sde.N = static_cast<std::size_t>(cfg.get_num("params.N", 200));
        sde.dt = cfg.get_num("params.dt", 1e-3);
        sde.t_end = t_end;
        sde.seed = seed;
        auto finals = ensemble_finals(sde, cluster_start(sde.N), replicas);
        auto cal = calibrate_semicircle(finals, t_end);
        cal.write_report(os);
    } else if (family == "mp") {
        const int n = static_cast<int>(cfg.get_num("params.n", 100));
        const int m = static_cast<int>(cfg.get_num("params.m", 2 * n));
        std::vector<OrderedSpectrum> finals;
        for (std::size_t r = 0; r < replicas; ++r) {
            WishartConfig wc;
            wc.n = n;
            wc.m = m;
            wc.dt = t_end;
            wc.seed = seed ^ r;
            finals.push_back(eigenvalues(simulate_wishart_path(wc, t_end).final()));
        }
        auto cal = calibrate_mp(finals, std::sqrt(t_end), static_cast<double>(m) / n);
        cal.write_report(os);
    } else {
        throw config_error("unknown params.family: " + family);
    }
}

} // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str(), path);
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text, const std::string& name)
{
    ExperimentConfig cfg;
    cfg.raw_ = text;
    cfg.name_ = name;
    std::istringstream is(text);
    std::string line, section = "experiment";
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line is not key=value: " + line);
        cfg.kv_[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& def) const
{
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double ExperimentConfig::get_num(const std::string& key, double def) const
{
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw config_error("config key " + key + " is not numeric: " + it->second);
    }
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t def) const
{
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    return std::stoull(it->second);
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const
{
    std::vector<double> out;
    auto it = kv_.find(key);
    if (it == kv_.end()) return out;
    std::string s = it->second;
    for (auto& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    double v;
    while (is >> v) out.push_back(v);
    return out;
}

std::vector<std::string> ExperimentConfig::validate() const
{
    std::vector<std::string> diag;
    static const char* kKnown[] = {"simulate-sde", "simulate-matrix", "solve-pde",
                                   "converge-N", "dominance", "contraction",
                                   "dirac-selection", "calibrate"};
    const std::string exp = experiment();
    if (std::find(std::begin(kKnown), std::end(kKnown), exp) == std::end(kKnown)) {
        diag.push_back("experiment.type must be one of simulate-sde, simulate-matrix, "
                       "solve-pde, converge-N, dominance, contraction, dirac-selection, "
                       "calibrate (got '" + exp + "')");
        return diag;
    }

    const std::string kind = get("kernel.kind", "dyson");
    if (kind != "dyson" && kind != "wishart" && kind != "general")
        diag.push_back("kernel.kind must be dyson, wishart or general");
    if (kind == "wishart") {
        const double c = get_num("kernel.c", 2.0);
        if (!(c >= 1.0))
            diag.push_back("kernel.c: Wishart requires the aspect ratio c = m/n >= 1");
    }
    if (kind == "general") {
        for (const char* k : {"kernel.f", "kernel.g", "kernel.sigma"}) {
            if (!has(k)) continue;
            try {
                Expression::parse(get(k, ""));
            } catch (const expression_error& e) {
                diag.push_back(std::string(k) + ": " + e.what());
            }
        }
        if (!has("kernel.sigma") && !(has("kernel.f") && has("kernel.g")))
            diag.push_back("general kernel needs kernel.sigma or both kernel.f and kernel.g");
    }

    if (has("params.dt") && !(get_num("params.dt", 1) > 0))
        diag.push_back("params.dt must be positive");
    if (has("params.t_end") && !(get_num("params.t_end", 1) > 0))
        diag.push_back("params.t_end must be positive");
    if (has("params.N") && get_num("params.N", 2) < 2)
        diag.push_back("params.N must be at least 2");
    if (has("params.n") && has("params.m") && get_num("params.m", 0) < get_num("params.n", 0))
        diag.push_back("params.m must be >= params.n (Wishart aspect requirement)");
    if (has("params.h") && !(get_num("params.h", 1) > 0))
        diag.push_back("params.h must be positive");
    if (has("params.drift")) {
        try {
            Expression::parse(get("params.drift", "0"));
        } catch (const expression_error& e) {
            diag.push_back(std::string("params.drift: ") + e.what());
        }
    }
    const double t_end = get_num("params.t_end", 1.0);
    auto rt = get_list("params.record_times");
    double prev = 0.0;
    for (double t : rt) {
        if (t < prev || t > t_end + 1e-12) {
            diag.push_back("params.record_times must be increasing within [0, t_end]");
            break;
        }
        prev = t;
    }
    return diag;
}

void run_experiment(const ExperimentConfig& cfg, const RunOptions& opts)
{
    auto diag = cfg.validate();
    if (!diag.empty()) {
        std::string msg = "invalid config:";
        for (const auto& d : diag) msg += "\n  - " + d;
        throw config_error(msg);
    }
    const std::string exp = cfg.experiment();
    const std::uint64_t seed =
        opts.seed_override ? *opts.seed_override : cfg.get_u64("experiment.seed", 0);
    fs::path dir = opts.out_dir.empty() ? fs::path("out-" + exp) : fs::path(opts.out_dir);
    fs::create_directories(dir);
    write_meta(dir, cfg, seed);

    if (exp == "simulate-sde")
        run_simulate_sde(cfg, dir, seed, opts.plots);
    else if (exp == "simulate-matrix")
        run_simulate_matrix(cfg, dir, seed, opts.plots);
    else if (exp == "solve-pde")
        run_solve_pde(cfg, dir, seed, opts.plots);
    else if (exp == "converge-N")
        run_converge_n(cfg, dir, seed, opts.plots);
    else if (exp == "dominance")
        run_dominance(cfg, dir, seed, opts.plots);
    else if (exp == "contraction")
        run_contraction(cfg, dir, seed, opts.plots);
    else if (exp == "dirac-selection")
        run_dirac_selection(cfg, dir, seed, opts.plots);
    else if (exp == "calibrate")
        run_calibrate(cfg, dir, seed, opts.plots);
}

} // namespace spectral
