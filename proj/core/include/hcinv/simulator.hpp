/**
 * @file simulator.hpp
 * @brief Monte Carlo paths of Brownian motion, health, mortality, wealth and
 *        the dual process under feedback policies.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "hcinv/policy.hpp"

namespace hcinv {

struct HealthSeries {
    std::vector<double> t, health, mortality;
};

/// Deterministic health and mortality on [0, T] with investment at
/// invest_time (invest_time >= T means never).
HealthSeries simulate_health_mortality(const Model& m, double h0, double invest_time, int n_steps = 400);

enum class StopPolicy { OptimalBoundary, InvestImmediately, NeverInvest, FixedThreshold };

struct SimConfig {
    std::size_t n_paths = 1000;
    int n_steps = 200;
    std::uint64_t seed = 1;
    double initial_time = 0.0;
    double initial_wealth = 100.0;
    double initial_health = 1000.0;
    StopPolicy policy = StopPolicy::OptimalBoundary;
    /// FixedThreshold invests once wealth reaches this multiple of b_hat.
    double threshold_factor = 2.0;
    /// Zero consumption and zero risky allocation throughout.
    bool passive = false;
    /// Root-find z* at every step instead of interpolating policy tables.
    bool exact_policy = false;
    /// Add the Milstein term for the wealth diffusion (strong order 1);
    /// false gives the plain Euler step.
    bool milstein = true;
    /// Brownian increments are drawn on a grid `substeps` times finer and
    /// summed, so runs at n and 2n steps can share one Brownian path.
    int substeps = 1;
    bool keep_series = true;
    /// Record max |X + J_z(s, Z, H)| over the pre-investment segment.
    bool track_identity = false;
    int identity_every = 1;  // check |X + J_z| on every k-th grid time
    unsigned threads = 1;
    int table_points = 240;
};

struct PathBundle {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> times;
    /// Series flattened as [path * (n_steps + 1) + step]; empty unless kept.
    std::vector<double> brownian, health, mortality, wealth, dual, consumption, allocation;
    std::vector<double> invest_time;  // NaN when the path never invests
    std::vector<int> invest_step;     // -1 when the path never invests
    std::vector<double> terminal_wealth;
    std::vector<double> path_welfare;  // discounted utility per path
    std::vector<double> identity_error;
    std::vector<std::uint8_t> absorbed;
    std::size_t n_absorbed = 0;

    double at(const std::vector<double>& s, std::size_t path, std::size_t step) const {
        return s[path * (n_steps + 1) + step];
    }
};

PathBundle simulate_closed_loop(const Model& m, const BoundarySurface& surf, const SimConfig& cfg);

struct WelfareEstimate {
    double estimate = 0;
    double std_error = 0;
};

/// Mean and standard error of the discounted utility of consumption,
/// accumulated with the left-point rule on the simulation grid.
WelfareEstimate welfare_estimate(const Model& m, const PathBundle& bundle);

}  // namespace hcinv
