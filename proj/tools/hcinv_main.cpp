/**
 * @file hcinv_main.cpp
 * @brief Command-line front end: boundary | sweep | value | policy | simulate | verify.
 */
#include <iostream>
#include <CLI11.hpp>

#include "hcinv/numerics.hpp"
#include "hcinv_app/commands.hpp"

using namespace hcinv::app;

int main(int argc, char** argv) {
    CLI::App app{"Free boundary, value functions and policies for the health-investment problem"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help");  // --h is the health list
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir = "out", h_list;
    int steps = 0, refine = 0;
    long long seed = -1;
    unsigned threads = 0;
    bool timestamp = false, quiet = false;
    app.add_option("--config", config_path, "JSON config (flat model keys plus grid/sim/sweep sections)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--steps", steps, "boundary time steps n")->check(CLI::Range(2, 1000000));
    app.add_option("--h", h_list, "comma-separated health values at t = 0");
    app.add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_option("--refine", refine, "residual refinement factor")->check(CLI::Range(1, 64));
    app.add_flag("--timestamp", timestamp, "record a timestamp in the manifest rows");
    app.add_flag("-q,--quiet", quiet, "suppress report lines");

    auto* boundary = app.add_subcommand("boundary", "solve the free boundary; dual and primal CSVs");
    auto* sweep = app.add_subcommand("sweep", "one boundary solve per parameter value, with a directions report");
    std::string sweep_param, sweep_values;
    sweep->add_option("--param", sweep_param, "h, delta, alpha, rho or any model key");
    sweep->add_option("--values", sweep_values, "comma-separated values");
    auto* value = app.add_subcommand("value", "J_hat, J and z-derivatives on a (t, z, h) lattice");
    std::size_t mc_paths = 0;
    value->add_option("--mc-paths", mc_paths, "also write Monte Carlo diagnostics with this many paths");
    auto* policy = app.add_subcommand("policy", "z*, V, c*, pi* on a (t, x, h) grid");
    auto* simulate = app.add_subcommand("simulate", "closed-loop Monte Carlo paths");
    bool trajectories = false;
    std::size_t paths = 0;
    simulate->add_flag("--trajectories", trajectories, "write decimated path series");
    simulate->add_option("--paths", paths, "number of paths");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    bool full = false;
    verify->add_flag("--full", full, "use the acceptance grid sizes (slow)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigError;
    }

    AppConfig cfg;
    RunOptions opt;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        else cfg.defaulted = hcinv::param_keys();
        if (steps) cfg.grid.n_steps = steps;
        if (refine) cfg.grid.refine = refine;
        if (!h_list.empty()) cfg.grid.h = parse_list(h_list);
        if (seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(seed);
        if (trajectories) cfg.sim.trajectories = true;
        if (paths) cfg.sim.n_paths = paths;
        for (double h : cfg.grid.h)
            if (!(h > 0)) throw ConfigError("health values must be positive");
        opt.out_dir = out_dir;
        opt.timestamp = timestamp;
        opt.threads = threads;
        opt.mc_paths = mc_paths;
        opt.full = full;
        opt.log = quiet ? nullptr : &std::cout;
        if (!quiet && !config_path.empty())
            for (const auto& k : cfg.defaulted)
                std::cerr << "config: '" << k << "' not set, using default " << hcinv::get_param(cfg.params, k)
                          << '\n';
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*boundary) return cmd_boundary(cfg, opt);
        if (*sweep) {
            const std::string p = sweep_param.empty() ? cfg.sweep.parameter : sweep_param;
            const auto vals = sweep_values.empty() ? cfg.sweep.values : parse_list(sweep_values);
            if (p.empty()) throw ConfigError("sweep needs --param or sweep.parameter");
            return cmd_sweep(cfg, opt, p, vals);
        }
        if (*value) return cmd_value(cfg, opt);
        if (*policy) return cmd_policy(cfg, opt);
        if (*simulate) return cmd_simulate(cfg, opt);
        if (*verify) return cmd_verify(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const hcinv::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    }
    return kOk;
}
