/**
 * @file commands.hpp
 * @brief Subcommands of the hcinv tool. Each writes CSV files with manifest
 *        rows into the output directory and returns a process exit code.
 */
#pragma once
#include <iosfwd>
#include <string>
#include <vector>
#include "hcinv_app/config.hpp"
#include "hcinv_app/csv.hpp"

namespace hcinv::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kVerifyFailed = 4 };

struct RunOptions {
    std::string out_dir = "out";
    bool timestamp = false;
    unsigned threads = 0;    // resolved worker count; 0 means available parallelism
    std::size_t mc_paths = 0;  // value: optional MC diagnostics
    bool full = false;       // verify: acceptance-size grids
    std::ostream* log = nullptr;  // progress and report lines; null for silence
};

Manifest make_manifest(const AppConfig& cfg, const RunOptions& opt, const std::string& subcommand);

int cmd_boundary(const AppConfig& cfg, const RunOptions& opt);
int cmd_sweep(const AppConfig& cfg, const RunOptions& opt, const std::string& param,
              const std::vector<double>& values);
int cmd_value(const AppConfig& cfg, const RunOptions& opt);
int cmd_policy(const AppConfig& cfg, const RunOptions& opt);
int cmd_simulate(const AppConfig& cfg, const RunOptions& opt);
int cmd_verify(const AppConfig& cfg, const RunOptions& opt);

}  // namespace hcinv::app
