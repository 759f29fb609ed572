/**
 * @file csv.hpp
 * @brief CSV output with '#' manifest rows above the header, and a reader
 *        for the same layout.
 */
#pragma once
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace hcinv::app {

/// Key/value rows written as "# key=value" above every CSV header.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> rows;
    void add(const std::string& key, const std::string& value) { rows.emplace_back(key, value); }
    std::string get(const std::string& key) const;
};

/// Shortest round-trippable text for a double; "nan" and "inf" as strtod reads them.
std::string fmt_num(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const Manifest& manifest,
              const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);
    std::size_t rows_written() const { return n_; }

private:
    std::ofstream out_;
    std::size_t width_ = 0, n_ = 0;
    std::string path_;
};

struct CsvTable {
    Manifest manifest;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double num(std::size_t row, std::size_t col) const;
    std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// File contents without the manifest rows.
std::string csv_body(const std::string& path);

}  // namespace hcinv::app
