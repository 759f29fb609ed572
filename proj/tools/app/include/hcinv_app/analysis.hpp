/**
 * @file analysis.hpp
 * @brief Shape diagnostics on solved boundaries and sweep direction reports.
 *
 * A sweep "moves the boundary up" when the time average of b_hat over the
 * nodes t in [0, T) is strictly increasing along the sweep values.
 */
#pragma once
#include <optional>
#include <string>
#include <vector>
#include "hcinv/policy.hpp"
#include "hcinv_app/config.hpp"

namespace hcinv::app {

/// b_hat at every node of curve `c`; entry 0 (t = T) is NaN.
std::vector<double> primal_curve(const Model& m, const BoundarySurface& surf, std::size_t c);

/// Sign changes of first differences, ignoring steps smaller than tol.
int sign_changes(const std::vector<double>& v, double tol);

/// Strictly decreasing in t over entries 1..n, i.e. v[k] < v[k+1] as xi grows.
/// Returns the number of violating pairs.
int decreasing_in_t_violations(const std::vector<double>& bhat);

/// Mean of entries 1..n.
double node_average(const std::vector<double>& v);

/// +1 strictly increasing, -1 strictly decreasing, 0 otherwise.
int direction_of(const std::vector<double>& metric);

/// Direction the boundary is expected to move when `param` grows.
/// Agents with h >= 100 count as healthy.
int expected_direction(const std::string& param, double h);

struct SweepEntry {
    double value = 0;
    ModelParams params;
    std::optional<BoundarySurface> surface;
    std::vector<std::vector<double>> bhat;  // per curve
    std::string error;
};

/// One boundary solve per value; failures are kept per entry.
std::vector<SweepEntry> run_sweep(const AppConfig& cfg, const std::string& param,
                                  const std::vector<double>& values, unsigned threads);

struct DirectionReport {
    std::string param;
    double h = 0;  // health of the curve; NaN for an h sweep
    std::vector<double> values, metric;
    int observed = 0, expected = 0;
    double pointwise = 0;  // fraction of (value pair, node) moving in the expected direction
    bool pass = false;
    std::string note;
};

std::vector<DirectionReport> sweep_directions(const std::vector<SweepEntry>& entries,
                                              const std::string& param);

struct OrderingReport {
    std::size_t checked = 0, violations = 0;
    double worst_gap = 0;  // most negative relative step between adjacent h
    bool pass = false;
};

/// c*(t, x, h) strictly increasing in h at every (t, x). `surf` must hold the
/// curves for every h in `hs` (health at t = 0).
OrderingReport consumption_ordering(const Model& m, const BoundarySurface& surf,
                                    const std::vector<double>& hs, const std::vector<double>& ts,
                                    const std::vector<double>& xs);

const char* direction_name(int d);

}  // namespace hcinv::app
