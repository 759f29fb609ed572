/**
 * @file checks.hpp
 * @brief The acceptance suite: one measured pass/fail result per criterion.
 *
 * Full settings use the grid sizes and sample counts the criteria name;
 * coarse settings shrink them so that `hcinv verify` finishes in about a
 * minute.
 */
#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>
#include "hcinv/params.hpp"

namespace hcinv::app {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string measured;  // human-readable numbers behind the verdict
    double seconds = 0;
    double budget = 0;     // runtime limit in seconds, 0 when none
};

struct CheckSettings {
    bool full = true;
    unsigned threads = 1;
    std::uint64_t seed = 20240611;
    std::string scratch_dir;  // criterion 11 writes here; empty: a temp dir
    std::ostream* log = nullptr;
};

/// Runs the requested criteria (all when `which` is empty), in id order.
std::vector<CheckResult> run_acceptance(const ModelParams& params, const CheckSettings& s,
                                        const std::vector<int>& which = {});

std::string format_result(const CheckResult& r);
std::string results_json(const std::vector<CheckResult>& rs, const CheckSettings& s);

}  // namespace hcinv::app
