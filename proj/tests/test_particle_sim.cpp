#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spectral/laws_metrics.hpp"
#include "spectral/particle_sim.hpp"
#include "support/oracles.hpp"

using namespace spectral;

namespace {

long double drift_dyson_oracle(const std::vector<double>& lam, std::size_t i)
{
    long double acc = 0;
    for (std::size_t j = 0; j < lam.size(); ++j)
        if (j != i) acc += 1.0L / (static_cast<long double>(lam[i]) - lam[j]);
    return acc / static_cast<long double>(lam.size());
}

OrderedSpectrum mp_quantile_positions(std::size_t n, double c, double edge)
{
    auto law = AnalyticLaw::marchenko_pastur(1.0, c, edge);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        v[i] = oracles::invert_cdf([&](double x) { return law.cdf(x); }, p,
                                   law.support_lo(), law.support_hi());
    }
    return OrderedSpectrum(v);
}

} // namespace

TEST_CASE("drift_dyson basics")
{
    OrderedSpectrum two({-1.0, 1.0});
    CHECK(drift_dyson(two, 0) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(drift_dyson(two, 1) == doctest::Approx(0.25).epsilon(1e-15));

    OrderedSpectrum sym({-0.7, 0.0, 0.7});
    CHECK(drift_dyson(sym, 1) == doctest::Approx(0.0).epsilon(1e-15));

    std::vector<double> eq(10);
    for (int i = 0; i < 10; ++i) eq[i] = i / 9.0;
    OrderedSpectrum s(eq);
    CHECK(drift_dyson(s, 0)
          == doctest::Approx(static_cast<double>(drift_dyson_oracle(eq, 0))).epsilon(1e-13));

    CHECK_THROWS_AS(drift_dyson(OrderedSpectrum({0.0, 0.0}), 0), collision_error);
}

TEST_CASE("drift_wishart basics")
{
    OrderedSpectrum s({1.0, 3.0});
    CHECK(drift_wishart(s, 1, 2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(drift_wishart(s, 0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(drift_wishart(OrderedSpectrum({-1.0, 3.0}), 0, 2.0), std::domain_error);
}

TEST_CASE("drift_wishart at MP quantiles follows the dilation velocity x/t")
{
    // the scaled MP family moves self-similarly, positions scale linearly in
    // t, so the bulk drift should match x/t at t=1
    const std::size_t n = 50;
    auto s = mp_quantile_positions(n, 2.0, 2.0);
    for (std::size_t i = 10; i < 40; ++i) {
        const double v = drift_wishart(s, i, 2.0);
        CHECK(std::abs(v - s[i]) <= 0.05 * std::abs(s[i]) + 0.02);
    }
}

TEST_CASE("drift_general specializations and oracle")
{
    auto dy = InteractionKernel::dyson();
    OrderedSpectrum s({-1.3, -0.2, 0.4, 1.9});
    for (std::size_t i = 0; i < s.count(); ++i)
        CHECK(drift_general(s, i, dy) == doctest::Approx(drift_dyson(s, i)).epsilon(1e-15));

    auto wi = InteractionKernel::wishart(2.0);
    OrderedSpectrum sp({0.5, 1.0, 2.5});
    for (std::size_t i = 0; i < sp.count(); ++i)
        CHECK(drift_general(sp, i, wi)
              == doctest::Approx(drift_wishart(sp, i, 2.0) - 2.0).epsilon(1e-13));

    // f(x,y) = sigma(x) sigma(y), sigma = 1 + x^2, against a long-double sum
    auto sig = [](double x) { return 1.0 + x * x; };
    auto ker = InteractionKernel::general_unchecked(
        [&](double x, double y) { return sig(x) * sig(y); }, nullptr, 10.0, 1.0);
    std::vector<double> pos{-1.0, -0.3, 0.1, 0.8, 1.7};
    OrderedSpectrum s5(pos);
    for (std::size_t i = 0; i < 5; ++i) {
        long double acc = 0;
        for (std::size_t j = 0; j < 5; ++j)
            if (j != i)
                acc += static_cast<long double>(sig(pos[i])) * sig(pos[j]) / (pos[i] - pos[j]);
        acc /= 5.0L;
        CHECK(drift_general(s5, i, ker)
              == doctest::Approx(static_cast<double>(acc)).epsilon(1e-13));
    }
}

TEST_CASE("step: two-particle repulsion and symmetric configurations")
{
    SdeConfig cfg;
    cfg.N = 2;
    cfg.dt = 1e-2;
    cfg.noise_scale = 0.0;
    std::mt19937_64 rng(1);
    OrderedSpectrum s({-1.0, 1.0});
    auto out = step(s, cfg, {0.0, 0.0}, 1e-2, rng);
    CHECK(out[1] - out[0] > 2.0);
    CHECK(out[0] == doctest::Approx(-out[1]).epsilon(1e-14));

    // odd-symmetric configuration stays symmetric under the zero-noise flow
    SdeConfig cfg5;
    cfg5.N = 5;
    cfg5.dt = 1e-2;
    cfg5.noise_scale = 0.0;
    OrderedSpectrum sym({-2.0, -1.0, 0.0, 1.0, 2.0});
    auto cur = sym;
    for (int k = 0; k < 20; ++k)
        cur = step(cur, cfg5, std::vector<double>(5, 0.0), 1e-2, rng);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(cur[i] == doctest::Approx(-cur[4 - i]).epsilon(1e-12));
    CHECK(cur[2] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("step rejects into stiffness on an engineered crossing")
{
    SdeConfig cfg;
    cfg.N = 2;
    cfg.dt = 1.0;
    cfg.noise_scale = 1.0;
    std::mt19937_64 rng(2);
    OrderedSpectrum s({0.0, 1e-9});
    // a huge opposing noise kick cannot be resolved at any refinement depth
    CHECK_THROWS_AS(step(s, cfg, {8.0, -8.0}, 1.0, rng), stiffness_error);
}

TEST_CASE("second-moment growth matches the Ito identity")
{
    const std::size_t n = 100;
    const double t = 1.0;
    SdeConfig cfg;
    cfg.N = n;
    cfg.dt = 2e-3;
    cfg.t_end = t;
    const double ns = cfg.resolved_noise(n);
    const double expected = (static_cast<double>(n - 1) / n + ns * ns) * t;
    double acc = 0.0;
    const int reps = 12;
    for (int r = 0; r < reps; ++r) {
        cfg.seed = 501 + r;
        auto traj = simulate(cfg, cluster_start(n), {t});
        double m2 = 0;
        for (double x : traj.snapshots.back().positions()) m2 += x * x;
        acc += m2 / n;
    }
    acc /= reps;
    CHECK(std::abs(acc - expected) <= 0.05 * expected);
}

TEST_CASE("two-particle zero-noise gap follows the exact ODE")
{
    SdeConfig cfg;
    cfg.N = 2;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.noise_scale = 0.0;
    cfg.seed = 9;
    auto traj = simulate(cfg, OrderedSpectrum({-1.0, 1.0}), {0.1, 0.25, 0.5});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        const double gap = traj.snapshots[k][1] - traj.snapshots[k][0];
        const double exact = std::sqrt(4.0 + (4.0 / 2.0) * t); // d(gap^2)/dt = 4/N
        CHECK(std::abs(gap - exact) <= 0.01 * exact);
    }
}

TEST_CASE("simulate is deterministic given the seed")
{
    SdeConfig cfg;
    cfg.N = 12;
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    cfg.seed = 77;
    auto a = simulate(cfg, cluster_start(12), {0.1, 0.2});
    auto b = simulate(cfg, cluster_start(12), {0.1, 0.2});
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        CHECK(a.snapshots[k].positions() == b.snapshots[k].positions());
}

TEST_CASE("Wishart stays strictly positive from a near-zero start")
{
    SdeConfig cfg;
    cfg.kernel = InteractionKernel::wishart(2.0);
    cfg.N = 100;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.seed = 3;
    std::vector<double> pos(100);
    for (int i = 0; i < 100; ++i) pos[i] = 1e-6 * (i + 1) / 100.0;
    auto traj = simulate(cfg, OrderedSpectrum(pos), {0.25, 0.5, 1.0});
    for (const auto& snap : traj.snapshots) {
        CHECK(snap[0] > 0.0);
        CHECK(snap.strictly_increasing());
    }
}

TEST_CASE("config validation")
{
    SdeConfig cfg;
    cfg.N = 1;
    CHECK_THROWS_AS(simulate(cfg, OrderedSpectrum(std::vector<double>{0.0}), {1.0}),
                    std::invalid_argument);
    SdeConfig cfg2;
    cfg2.N = 2;
    cfg2.dt = 0.0;
    CHECK_THROWS_AS(simulate(cfg2, OrderedSpectrum({0.0, 1.0}), {1.0}), std::invalid_argument);
    SdeConfig cfg3;
    cfg3.N = 2;
    CHECK_THROWS_AS(simulate(cfg3, OrderedSpectrum({0.0, 0.0}), {1.0}), std::invalid_argument);
    SdeConfig cfg4;
    cfg4.kernel = InteractionKernel::wishart(2.0);
    cfg4.N = 2;
    CHECK_THROWS_AS(simulate(cfg4, OrderedSpectrum({-1.0, 1.0}), {1.0}), std::invalid_argument);
}

TEST_CASE("exchangeability: sorting before or after permutation is equivalent")
{
    std::vector<double> pos{0.4, -1.2, 2.0, 0.9, -0.1};
    auto sorted_first = OrderedSpectrum::from_unsorted(pos);
    std::rotate(pos.begin(), pos.begin() + 2, pos.end());
    auto permuted = OrderedSpectrum::from_unsorted(pos);
    CHECK(sorted_first.positions() == permuted.positions());

    SdeConfig cfg;
    cfg.N = 5;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.seed = 4;
    auto a = simulate(cfg, sorted_first, {0.1});
    auto b = simulate(cfg, permuted, {0.1});
    CHECK(a.snapshots.back().positions() == b.snapshots.back().positions());
}

TEST_CASE("Dyson translation equivariance")
{
    SdeConfig cfg;
    cfg.N = 10;
    cfg.dt = 1e-3;
    cfg.t_end = 0.3;
    cfg.seed = 21;
    const double shift = 0.5;
    std::vector<double> base(10);
    for (int i = 0; i < 10; ++i) base[i] = -1.0 + 0.2 * i + 0.01 * (i % 3);
    auto a = simulate(cfg, OrderedSpectrum(base), {0.3});
    std::vector<double> shifted = base;
    for (auto& x : shifted) x += shift;
    auto b = simulate(cfg, OrderedSpectrum(shifted), {0.3});
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(std::abs(b.snapshots.back()[i] - a.snapshots.back()[i] - shift) <= 1e-12);
}

TEST_CASE("center of mass is conserved by the zero-noise Dyson flow")
{
    SdeConfig cfg;
    cfg.N = 20;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.noise_scale = 0.0;
    cfg.seed = 5;
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> pos(20);
    for (auto& x : pos) x = u(rng);
    std::sort(pos.begin(), pos.end());
    double sum0 = 0;
    for (double x : pos) sum0 += x;
    auto traj = simulate(cfg, OrderedSpectrum(pos), {1.0});
    double sum1 = 0;
    for (double x : traj.snapshots.back().positions()) sum1 += x;
    CHECK(std::abs(sum1 - sum0) <= 1e-12 * 20);
}

TEST_CASE("zero-noise flow is lp non-expansive up to discretization")
{
    SdeConfig cfg;
    cfg.N = 15;
    cfg.dt = 1e-3;
    cfg.t_end = 0.4;
    cfg.noise_scale = 0.0;
    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> a(15), b(15);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        for (std::size_t i = 1; i < 15; ++i) {
            a[i] = std::max(a[i], a[i - 1] + 0.05);
            b[i] = std::max(b[i], b[i - 1] + 0.05);
        }
        cfg.seed = 100 + rep;
        auto ta = simulate(cfg, OrderedSpectrum(a), {0.4});
        auto tb = simulate(cfg, OrderedSpectrum(b), {0.4});
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            const double before = oracles::sorted_vector_wp(a, b, p);
            const double after = oracles::sorted_vector_wp(ta.snapshots.back().positions(),
                                                           tb.snapshots.back().positions(), p);
            CHECK(after <= before + 10.0 * cfg.dt);
        }
    }
}

TEST_CASE("coupled runs: identical initial data stay identical")
{
    SdeConfig cfg;
    cfg.N = 10;
    cfg.dt = 1e-3;
    cfg.t_end = 0.3;
    cfg.seed = 8;
    std::vector<double> pos(10);
    for (int i = 0; i < 10; ++i) pos[i] = 0.3 * i;
    auto run = coupled_dominance_run(cfg, OrderedSpectrum(pos), OrderedSpectrum(pos), {0.3});
    CHECK(run.report.violations.empty());
    CHECK(run.report.worst_excess <= 0.0);
    CHECK(run.first.snapshots.back().positions() == run.second.snapshots.back().positions());
}

TEST_CASE("coupled runs: a constant shift is preserved exactly")
{
    SdeConfig cfg;
    cfg.N = 10;
    cfg.dt = 1e-3;
    cfg.t_end = 0.3;
    cfg.seed = 12;
    const double delta = 0.8;
    std::vector<double> a(10), b(10);
    for (int i = 0; i < 10; ++i) {
        a[i] = 0.25 * i;
        b[i] = a[i] + delta;
    }
    auto run = coupled_dominance_run(cfg, OrderedSpectrum(a), OrderedSpectrum(b), {0.3});
    CHECK(run.report.violations.empty());
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(run.second.snapshots.back()[i] - run.first.snapshots.back()[i]
              == doctest::Approx(delta).epsilon(1e-12));
}

TEST_CASE("coupled runs: random dominated pairs show no violations")
{
    SdeConfig cfg;
    cfg.N = 50;
    cfg.dt = 1e-4;
    cfg.t_end = 0.2;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0), up(0.0, 0.5);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> a(50), b(50);
        for (auto& x : a) x = u(rng);
        std::sort(a.begin(), a.end());
        for (std::size_t i = 0; i < 50; ++i) b[i] = a[i] + up(rng);
        std::sort(b.begin(), b.end());
        cfg.seed = 200 + rep;
        auto run = coupled_dominance_run(cfg, OrderedSpectrum(a), OrderedSpectrum(b), {0.2});
        CHECK(run.report.violations.empty());
        CHECK(run.report.worst_excess <= run.report.tol);
    }
}

TEST_CASE("coupled runs validate their preconditions")
{
    SdeConfig cfg;
    cfg.N = 3;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    CHECK_THROWS_AS(coupled_dominance_run(cfg, OrderedSpectrum({0.0, 1.0, 3.0}),
                                          OrderedSpectrum({0.5, 1.5, 2.0}), {0.1}),
                    std::invalid_argument);
}

TEST_CASE("ensemble finals derive per-replica seeds")
{
    SdeConfig cfg;
    cfg.N = 8;
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    cfg.seed = 40;
    auto finals = ensemble_finals(cfg, cluster_start(8), 3);
    CHECK(finals.size() == 3);
    CHECK(finals[0].positions() != finals[1].positions());
    CHECK(finals[1].positions() != finals[2].positions());
}

TEST_CASE("trajectory CSV format")
{
    SdeConfig cfg;
    cfg.N = 2;
    cfg.dt = 1e-2;
    cfg.t_end = 0.1;
    cfg.noise_scale = 0.0;
    auto traj = simulate(cfg, OrderedSpectrum({-1.0, 1.0}), {0.1});
    std::stringstream ss;
    traj.write_csv(ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "t,i,lambda");
    std::getline(ss, line);
    CHECK(line.substr(0, 4) == "0.1,");
}
