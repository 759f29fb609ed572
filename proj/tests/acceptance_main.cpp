/**
 * @file acceptance_main.cpp
 * @brief Runs every acceptance criterion at full size and prints one
 *        PASS/FAIL line per criterion. Exit status 1 when any fails.
 */
#include <fstream>
#include <iostream>
#include <thread>
#include <CLI11.hpp>

#include "hcinv_app/checks.hpp"

using namespace hcinv::app;

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    CheckSettings s;
    s.threads = std::max(1u, std::thread::hardware_concurrency());
    bool coarse = false, verbose = false;
    std::string json_out;
    std::vector<int> which;
    app.add_option("--scratch", s.scratch_dir, "working directory for the determinism check");
    app.add_option("--threads", s.threads, "worker threads");
    app.add_option("--only", which, "criterion ids to run");
    app.add_option("--json", json_out, "also write the results as JSON");
    app.add_flag("--coarse", coarse, "small grids, for a quick look");
    app.add_flag("-v,--verbose", verbose, "progress lines on stderr");
    CLI11_PARSE(app, argc, argv);
    s.full = !coarse;
    if (verbose) s.log = &std::cerr;

    const auto results = run_acceptance(hcinv::ModelParams{}, s, which);
    bool all = true;
    for (const auto& r : results) {
        std::cout << format_result(r) << '\n';
        all = all && r.pass;
    }
    if (!json_out.empty()) std::ofstream(json_out) << results_json(results, s) << '\n';
    return all ? 0 : 1;
}
