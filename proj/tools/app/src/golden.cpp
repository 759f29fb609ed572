#include "hcinv_app/golden.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <boost/crc.hpp>
#include <json.hpp>

#include "hcinv_app/commands.hpp"
#include "hcinv_app/config.hpp"

namespace hcinv::app {
namespace fs = std::filesystem;
using nlohmann::json;

const ColumnTol& GoldenCase::tol(const std::string& column) const {
    auto it = columns.find(column);
    return it == columns.end() ? fallback : it->second;
}

std::string crc32_hex(const std::string& data) {
    boost::crc_32_type crc;
    crc.process_bytes(data.data(), data.size());
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
    return buf;
}

namespace {

ColumnTol read_tol(const json& j, ColumnTol t) {
    if (j.contains("abs")) t.abs = j.at("abs").get<double>();
    if (j.contains("rel")) t.rel = j.at("rel").get<double>();
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<GoldenCase> load_golden_manifest(const std::string& dir) {
    const json j = json::parse(slurp((fs::path(dir) / "manifest.json").string()));
    std::vector<GoldenCase> out;
    for (const auto& c : j.at("cases")) {
        GoldenCase g;
        g.name = c.at("name").get<std::string>();
        g.command = c.at("command").get<std::string>();
        g.config_json = c.value("config", json::object()).dump();
        g.output = c.at("output").get<std::string>();
        g.file = c.at("file").get<std::string>();
        g.digest = c.value("digest", "");
        if (c.contains("sweep")) {
            g.sweep_param = c["sweep"].at("parameter").get<std::string>();
            g.sweep_values = c["sweep"].at("values").get<std::vector<double>>();
        }
        if (c.contains("tolerance")) {
            const auto& t = c["tolerance"];
            if (t.contains("default")) g.fallback = read_tol(t["default"], g.fallback);
            if (t.contains("columns"))
                for (auto it = t["columns"].begin(); it != t["columns"].end(); ++it)
                    g.columns[it.key()] = read_tol(it.value(), g.fallback);
        }
        out.push_back(std::move(g));
    }
    return out;
}

void save_golden_manifest(const std::string& dir, const std::vector<GoldenCase>& cases) {
    json arr = json::array();
    for (const auto& g : cases) {
        json c = {{"name", g.name},
                  {"command", g.command},
                  {"config", json::parse(g.config_json)},
                  {"output", g.output},
                  {"file", g.file},
                  {"digest", g.digest}};
        if (!g.sweep_param.empty()) c["sweep"] = {{"parameter", g.sweep_param}, {"values", g.sweep_values}};
        json cols = json::object();
        for (const auto& [k, t] : g.columns) cols[k] = {{"abs", t.abs}, {"rel", t.rel}};
        c["tolerance"] = {{"default", {{"abs", g.fallback.abs}, {"rel", g.fallback.rel}}}, {"columns", cols}};
        arr.push_back(c);
    }
    std::ofstream((fs::path(dir) / "manifest.json").string()) << json{{"cases", arr}}.dump(2) << '\n';
}

std::string run_golden_case(const GoldenCase& c, const std::string& scratch) {
    AppConfig cfg = config_from_json(c.config_json);
    cfg.source = "golden:" + c.name;
    RunOptions opt;
    opt.out_dir = (fs::path(scratch) / c.name).string();
    opt.threads = 1;
    int rc = 0;
    if (c.command == "boundary") rc = cmd_boundary(cfg, opt);
    else if (c.command == "sweep") rc = cmd_sweep(cfg, opt, c.sweep_param, c.sweep_values);
    else if (c.command == "value") rc = cmd_value(cfg, opt);
    else if (c.command == "policy") rc = cmd_policy(cfg, opt);
    else if (c.command == "simulate") rc = cmd_simulate(cfg, opt);
    else throw std::runtime_error("golden case '" + c.name + "': unknown command '" + c.command + "'");
    if (rc != kOk) throw std::runtime_error("golden case '" + c.name + "': command exited " + std::to_string(rc));
    return (fs::path(opt.out_dir) / c.output).string();
}

std::vector<Drift> compare_tables(const GoldenCase& c, const CsvTable& e, const CsvTable& a,
                                  std::vector<std::string>* problems) {
    std::vector<Drift> out;
    if (e.header != a.header) {
        if (problems) problems->push_back("header differs");
        return out;
    }
    if (e.rows.size() != a.rows.size()) {
        if (problems)
            problems->push_back("row count " + std::to_string(a.rows.size()) + ", golden has " +
                                std::to_string(e.rows.size()));
        return out;
    }
    for (std::size_t col = 0; col < e.header.size(); ++col) {
        const ColumnTol& t = c.tol(e.header[col]);
        for (std::size_t r = 0; r < e.rows.size(); ++r) {
            const double x = e.num(r, col), y = a.num(r, col);
            if (std::isnan(x) && std::isnan(y)) continue;
            const double allowed = t.abs + t.rel * std::abs(x);
            if (!(std::abs(x - y) <= allowed)) out.push_back({e.header[col], r, x, y, allowed});
        }
    }
    return out;
}

CaseReport check_golden_case(const GoldenCase& c, const std::string& dir, const std::string& scratch) {
    CaseReport rep;
    rep.name = c.name;
    const std::string gpath = (fs::path(dir) / c.file).string();
    try {
        if (crc32_hex(csv_body(gpath)) != c.digest) rep.problems.push_back("golden file digest mismatch");
        const CsvTable expected = read_csv(gpath);
        const CsvTable actual = read_csv(run_golden_case(c, scratch));
        rep.drifts = compare_tables(c, expected, actual, &rep.problems);
    } catch (const std::exception& e) {
        rep.problems.push_back(e.what());
    }
    rep.ok = rep.problems.empty() && rep.drifts.empty();
    return rep;
}

void regenerate_golden_case(GoldenCase& c, const std::string& dir, const std::string& scratch) {
    const std::string produced = run_golden_case(c, scratch);
    const std::string gpath = (fs::path(dir) / c.file).string();
    fs::copy_file(produced, gpath, fs::copy_options::overwrite_existing);
    c.digest = crc32_hex(csv_body(gpath));
}

}  // namespace hcinv::app
