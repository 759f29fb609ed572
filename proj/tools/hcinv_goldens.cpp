/**
 * @file hcinv_goldens.cpp
 * @brief Regenerates the golden corpus and reports drifts beyond tolerance.
 *
 * Default mode checks every case. --update rewrites golden files and digests;
 * it refuses to run without --ack-clean so that goldens are only refreshed
 * from a committed tree.
 */
#include <filesystem>
#include <iostream>
#include <CLI11.hpp>

#include "hcinv_app/commands.hpp"
#include "hcinv_app/golden.hpp"

using namespace hcinv::app;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"golden corpus regeneration"};
    std::string corpus = "tests/golden", scratch;
    std::vector<std::string> only;
    bool update = false, ack = false;
    std::size_t show = 5;
    app.add_option("--corpus", corpus, "directory holding manifest.json");
    app.add_option("--case", only, "restrict to these cases");
    app.add_option("--scratch", scratch, "working directory (default: a temp dir)");
    app.add_option("--show", show, "drifts to print per case");
    app.add_flag("--update", update, "rewrite golden files and digests");
    app.add_flag("--ack-clean", ack, "acknowledge a clean working tree (required by --update)");
    CLI11_PARSE(app, argc, argv);

    if (update && !ack) {
        std::cerr << "--update rewrites the corpus; commit first and pass --ack-clean\n";
        return kConfigError;
    }
    const fs::path work = scratch.empty() ? fs::temp_directory_path() / "hcinv_goldens" : fs::path(scratch);
    std::vector<GoldenCase> cases;
    try {
        cases = load_golden_manifest(corpus);
    } catch (const std::exception& e) {
        std::cerr << "cannot load corpus: " << e.what() << '\n';
        return kConfigError;
    }
    auto selected = [&](const GoldenCase& c) {
        return only.empty() || std::find(only.begin(), only.end(), c.name) != only.end();
    };

    if (update) {
        for (auto& c : cases) {
            if (!selected(c)) continue;
            regenerate_golden_case(c, corpus, work.string());
            std::cout << "regenerated " << c.name << " (" << c.digest << ")\n";
        }
        save_golden_manifest(corpus, cases);
        return kOk;
    }

    std::size_t failing = 0;
    for (const auto& c : cases) {
        if (!selected(c)) continue;
        const CaseReport r = check_golden_case(c, corpus, work.string());
        std::cout << (r.ok ? "ok     " : "DRIFT  ") << c.name;
        if (!r.drifts.empty()) std::cout << "  " << r.drifts.size() << " cells beyond tolerance";
        std::cout << '\n';
        for (const auto& p : r.problems) std::cout << "         " << p << '\n';
        for (std::size_t i = 0; i < std::min(show, r.drifts.size()); ++i) {
            const Drift& d = r.drifts[i];
            std::cout << "         row " << d.row << " " << d.column << ": " << d.actual << " vs golden "
                      << d.expected << " (allowed " << d.allowed << ")\n";
        }
        if (!r.ok) ++failing;
    }
    std::cout << failing << " drifting case(s)\n";
    return failing ? kVerifyFailed : kOk;
}
