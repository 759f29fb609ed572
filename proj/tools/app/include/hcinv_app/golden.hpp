/**
 * @file golden.hpp
 * @brief Golden-file corpus: cases defined in manifest.json, regenerated by
 *        running the same subcommand and compared column by column.
 *
 * Comparisons use per-column tolerances, never bytes, because libm results
 * differ across targets. The stored CRC-32 digest only guards the golden
 * file itself against accidental edits.
 */
#pragma once
#include <map>
#include <string>
#include <vector>
#include "hcinv_app/csv.hpp"

namespace hcinv::app {

struct ColumnTol {
    double abs = 1e-12;
    double rel = 1e-9;
};

struct GoldenCase {
    std::string name;
    std::string command;      // boundary | sweep | value | policy | simulate
    std::string config_json;  // same layout as a --config file
    std::string output;       // file the command writes
    std::string file;         // golden file name inside the corpus
    std::string digest;       // CRC-32 of the golden body, hex
    std::string sweep_param;
    std::vector<double> sweep_values;
    ColumnTol fallback;
    std::map<std::string, ColumnTol> columns;

    const ColumnTol& tol(const std::string& column) const;
};

struct Drift {
    std::string column;
    std::size_t row = 0;
    double expected = 0, actual = 0, allowed = 0;
};

struct CaseReport {
    std::string name;
    bool ok = false;
    std::vector<std::string> problems;  // structural failures
    std::vector<Drift> drifts;
};

std::string crc32_hex(const std::string& data);

std::vector<GoldenCase> load_golden_manifest(const std::string& corpus_dir);
void save_golden_manifest(const std::string& corpus_dir, const std::vector<GoldenCase>& cases);

/// Runs the case's command into `scratch_dir` and returns the output path.
std::string run_golden_case(const GoldenCase& c, const std::string& scratch_dir);

std::vector<Drift> compare_tables(const GoldenCase& c, const CsvTable& expected, const CsvTable& actual,
                                  std::vector<std::string>* problems);

CaseReport check_golden_case(const GoldenCase& c, const std::string& corpus_dir, const std::string& scratch_dir);

/// Overwrites the golden file and updates the digest in `c`.
void regenerate_golden_case(GoldenCase& c, const std::string& corpus_dir, const std::string& scratch_dir);

}  // namespace hcinv::app
