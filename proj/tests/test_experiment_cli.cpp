#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spectral/experiment.hpp"
#include "spectral/expression.hpp"

using namespace spectral;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("expression parsing and evaluation")
{
    CHECK(Expression::parse("1+2*3").eval(0) == 7.0);
    CHECK(Expression::parse("(1+2)*3").eval(0) == 9.0);
    CHECK(Expression::parse("2^3^2").eval(0) == 512.0); // right associative
    CHECK(Expression::parse("-x^2").eval(3) == -9.0);
    CHECK(Expression::parse("abs(-2)").eval(0) == 2.0);
    CHECK(Expression::parse("sqrt(1+x^2)*sqrt(1+y^2)").eval(1, 2)
          == doctest::Approx(std::sqrt(2.0) * std::sqrt(5.0)));
    CHECK(Expression::parse("tanh(z)").eval(0, 0, 0.5) == doctest::Approx(std::tanh(0.5)));
    CHECK(Expression::parse("x - y/2").eval(2, 4) == 0.0);
    CHECK_THROWS_AS(Expression::parse("2 +"), expression_error);
    CHECK_THROWS_AS(Expression::parse("foo(3)"), expression_error);
    CHECK_THROWS_AS(Expression::parse("(1+2"), expression_error);
    CHECK_THROWS_AS(Expression::parse("1 2"), expression_error);
}

TEST_CASE("config parsing: sections, comments, lists")
{
    auto cfg = ExperimentConfig::from_string("[experiment]\n"
                                             "type = simulate-sde # trailing comment\n"
                                             "seed = 7\n"
                                             "\n"
                                             "[params]\n"
                                             "N = 16\n"
                                             "record_times = 0.5, 1.0\n",
                                             "test");
    CHECK(cfg.experiment() == "simulate-sde");
    CHECK(cfg.get_u64("experiment.seed", 0) == 7);
    CHECK(cfg.get_num("params.N", 0) == 16);
    auto rt = cfg.get_list("params.record_times");
    REQUIRE(rt.size() == 2);
    CHECK(rt[0] == 0.5);
    CHECK(rt[1] == 1.0);
    CHECK_THROWS_AS(ExperimentConfig::from_string("[params]\nnot a kv line\n", "bad"),
                    config_error);
}

TEST_CASE("validate flags bad configs and passes good ones")
{
    auto bad_c = ExperimentConfig::from_string("[experiment]\ntype = simulate-sde\n"
                                               "[kernel]\nkind = wishart\nc = 0.5\n",
                                               "t");
    auto diag = bad_c.validate();
    REQUIRE(diag.size() >= 1);
    CHECK(diag[0].find("m/n >= 1") != std::string::npos);

    auto bad_dt = ExperimentConfig::from_string("[experiment]\ntype = simulate-sde\n"
                                                "[params]\ndt = 0\n",
                                                "t");
    CHECK_FALSE(bad_dt.validate().empty());

    auto bad_exp = ExperimentConfig::from_string("[experiment]\ntype = frobnicate\n", "t");
    CHECK_FALSE(bad_exp.validate().empty());

    auto bad_expr = ExperimentConfig::from_string("[experiment]\ntype = simulate-sde\n"
                                                  "[kernel]\nkind = general\nsigma = sqrt(\n",
                                                  "t");
    CHECK_FALSE(bad_expr.validate().empty());

    auto good = ExperimentConfig::from_string("[experiment]\ntype = simulate-sde\nseed = 1\n"
                                              "[kernel]\nkind = dyson\n"
                                              "[params]\nN = 8\ndt = 0.001\nt_end = 0.1\n",
                                              "t");
    CHECK(good.validate().empty());
}

TEST_CASE("simulate-sde experiment writes its artifacts reproducibly")
{
    const std::string text = "[experiment]\ntype = simulate-sde\nseed = 11\n"
                             "[kernel]\nkind = dyson\n"
                             "[params]\nN = 8\ndt = 0.001\nt_end = 0.05\n";
    auto cfg = ExperimentConfig::from_string(text, "sde-test");
    TempDir dir("spectral-cli-test-sde");
    RunOptions opts;
    opts.out_dir = (dir.path / "a").string();
    run_experiment(cfg, opts);
    CHECK(fs::exists(dir.path / "a" / "trajectory.csv"));
    CHECK(fs::exists(dir.path / "a" / "final_spectrum.csv"));
    CHECK(fs::exists(dir.path / "a" / "run.meta"));
    auto meta = slurp(dir.path / "a" / "run.meta");
    CHECK(meta.find("config_hash=") != std::string::npos);
    CHECK(meta.find("seed=11") != std::string::npos);

    RunOptions opts2;
    opts2.out_dir = (dir.path / "b").string();
    run_experiment(cfg, opts2);
    CHECK(slurp(dir.path / "a" / "trajectory.csv") == slurp(dir.path / "b" / "trajectory.csv"));
    CHECK(slurp(dir.path / "a" / "final_spectrum.csv")
          == slurp(dir.path / "b" / "final_spectrum.csv"));
}

TEST_CASE("solve-pde experiment writes snapshots and report")
{
    const std::string text = "[experiment]\ntype = solve-pde\n"
                             "[kernel]\nkind = dyson\n"
                             "[params]\ninit = semicircle\nt0 = 1\nradius_coeff = 2\n"
                             "grid_lo = -4\ngrid_hi = 4\nh = 0.04\ndt = 0.04\nt_end = 0.1\n";
    auto cfg = ExperimentConfig::from_string(text, "pde-test");
    TempDir dir("spectral-cli-test-pde");
    RunOptions opts;
    opts.out_dir = dir.path.string();
    opts.plots = true;
    run_experiment(cfg, opts);
    CHECK(fs::exists(dir.path / "snapshot_000.csv"));
    CHECK(fs::exists(dir.path / "solve_report.csv"));
    CHECK(fs::exists(dir.path / "snapshots.svg"));
    auto svg = slurp(dir.path / "snapshots.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("dominance experiment reports zero violations for identical pairs")
{
    const std::string text = "[experiment]\ntype = dominance\nseed = 3\n"
                             "[kernel]\nkind = dyson\n"
                             "[params]\nN = 10\ndt = 0.001\nt_end = 0.05\nruns = 2\n";
    auto cfg = ExperimentConfig::from_string(text, "dom-test");
    TempDir dir("spectral-cli-test-dom");
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run_experiment(cfg, opts);
    auto meta = slurp(dir.path / "run.meta");
    CHECK(meta.find("total_violations=0") != std::string::npos);
}

TEST_CASE("general kernel from a sigma expression builds and runs")
{
    const std::string text = "[experiment]\ntype = simulate-sde\nseed = 2\n"
                             "[kernel]\nkind = general\nsigma = sqrt(1+x^2)\n"
                             "lipschitz_C = 64\nalpha0 = 1\n"
                             "[params]\nN = 6\ndt = 0.001\nt_end = 0.02\n";
    auto cfg = ExperimentConfig::from_string(text, "gen-test");
    CHECK(cfg.validate().empty());
    TempDir dir("spectral-cli-test-gen");
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run_experiment(cfg, opts);
    CHECK(fs::exists(dir.path / "final_spectrum.csv"));
}

TEST_CASE("seed override takes precedence over the config seed")
{
    const std::string text = "[experiment]\ntype = simulate-sde\nseed = 5\n"
                             "[kernel]\nkind = dyson\n"
                             "[params]\nN = 6\ndt = 0.001\nt_end = 0.02\n";
    auto cfg = ExperimentConfig::from_string(text, "seed-test");
    TempDir dir("spectral-cli-test-seed");
    RunOptions a, b, c;
    a.out_dir = (dir.path / "a").string();
    b.out_dir = (dir.path / "b").string();
    b.seed_override = 5;
    c.out_dir = (dir.path / "c").string();
    c.seed_override = 123;
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    run_experiment(cfg, c);
    CHECK(slurp(dir.path / "a" / "final_spectrum.csv")
          == slurp(dir.path / "b" / "final_spectrum.csv"));
    CHECK(slurp(dir.path / "a" / "final_spectrum.csv")
          != slurp(dir.path / "c" / "final_spectrum.csv"));
}

TEST_CASE("run_experiment rejects invalid configs with a config_error")
{
    auto cfg = ExperimentConfig::from_string("[experiment]\ntype = nope\n", "t");
    RunOptions opts;
    opts.out_dir = (fs::temp_directory_path() / "spectral-cli-test-bad").string();
    CHECK_THROWS_AS(run_experiment(cfg, opts), config_error);
}
