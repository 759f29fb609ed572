/**
 * @file config.hpp
 * @brief Run configuration: model parameters plus grid, sim and sweep sections.
 */
#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>
#include "hcinv/params.hpp"

namespace hcinv::app {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSection {
    int n_steps = 200;
    std::vector<double> h{2.0, 1000.0};  // health at t = 0, one curve each
    int refine = 4;
    int t_points = 10;   // value/policy lattices in t (T included for value)
    int z_points = 20;
    double z_min = 0.05;
    double z_max = 50.0;
    int x_points = 40;
    double x_max = 0.0;  // <= 0: twice the largest primal boundary
    unsigned threads = 0;  // 0: available parallelism
};

struct SimSection {
    std::size_t n_paths = 1000;
    int n_steps = 200;
    std::uint64_t seed = 1;
    double initial_time = 0.0;
    double initial_wealth = 100.0;
    double initial_health = 1000.0;
    std::string policy = "optimal";  // optimal | immediate | never | threshold
    double threshold_factor = 2.0;
    bool exact = false;
    int substeps = 1;
    bool trajectories = false;
};

struct SweepSection {
    std::string parameter;
    std::vector<double> values;
};

struct AppConfig {
    ModelParams params;
    GridSection grid;
    SimSection sim;
    SweepSection sweep;
    std::string source;                  // file path, or empty for defaults
    std::vector<std::string> defaulted;  // model keys that fell back to Table-1 values
};

AppConfig config_from_json(const std::string& text);
AppConfig load_config(const std::string& path);

std::vector<double> parse_list(const std::string& text);

}  // namespace hcinv::app
