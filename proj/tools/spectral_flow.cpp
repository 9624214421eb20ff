#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spectral/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"spectral-flow: eigenvalue dynamics experiments"};
    app.set_version_flag("--version", std::string("spectral-flow ") + spectral::kToolVersion);

    std::string experiment;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool plots = false;

    app.add_option("experiment", experiment,
                   "experiment name (simulate-sde, simulate-matrix, solve-pde, converge-N, "
                   "dominance, contraction, dirac-selection, calibrate) or 'validate'")
        ->required();
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--out", out_dir, "output directory (default out-<experiment>)");
    auto* seed_opt = app.add_option("--seed", seed, "seed override");
    app.add_flag("--plots", plots, "emit SVG plots alongside the CSVs");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        auto cfg = spectral::ExperimentConfig::load(config_path);
        if (experiment == "validate") {
            auto diag = cfg.validate();
            if (diag.empty()) {
                std::puts("config ok");
                return 0;
            }
            for (const auto& d : diag) std::printf("diagnostic: %s\n", d.c_str());
            return 2;
        }
        if (!cfg.experiment().empty() && cfg.experiment() != experiment) {
            std::fprintf(stderr, "error: config declares experiment.type=%s, asked to run %s\n",
                         cfg.experiment().c_str(), experiment.c_str());
            return 2;
        }
        spectral::RunOptions opts;
        opts.out_dir = out_dir;
        if (seed_set) opts.seed_override = seed;
        opts.plots = plots;
        spectral::run_experiment(cfg, opts);
        return 0;
    } catch (const spectral::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: numerical failure: %s\n", e.what());
        return 3;
    }
}
