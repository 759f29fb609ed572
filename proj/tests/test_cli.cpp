#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <doctest.h>

#include "hcinv_app/commands.hpp"
#include "hcinv_app/config.hpp"
#include "hcinv_app/csv.hpp"

using namespace hcinv::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hcinv_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

AppConfig small_config() {
    AppConfig c = config_from_json(R"({"grid": {"n_steps": 20, "h": [2, 1000], "refine": 1,
        "t_points": 3, "z_points": 4, "x_points": 5, "threads": 2},
        "sim": {"n_paths": 20, "n_steps": 20}})");
    return c;
}

RunOptions opts(const fs::path& dir) {
    RunOptions o;
    o.out_dir = dir.string();
    o.threads = 2;
    return o;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HCINV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const AppConfig c = config_from_json(R"({"delta": 0.011, "grid": {"n_steps": 50, "h": [5, 7]}})");
    CHECK(c.params.delta == 0.011);
    CHECK(c.grid.n_steps == 50);
    CHECK(c.grid.h == std::vector<double>{5, 7});
    CHECK(c.sim.n_paths == 1000);
    // missing model keys fall back to their defaults and are reported
    CHECK(c.params.alpha == 0.2258);
    CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "alpha") != c.defaulted.end());
    CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "delta") == c.defaulted.end());

    CHECK_THROWS_AS(config_from_json(R"({"grid": {"n_step": 5}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"gird": {}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"grid": {"n_steps": 1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"sim": {"policy": "sometimes"}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"sigma": -1})"), ConfigError);
    CHECK_THROWS_AS(config_from_json("{"), std::exception);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("list parsing") {
    CHECK(parse_list("1, 2.5,3e-2") == std::vector<double>{1, 2.5, 0.03});
    CHECK_THROWS_AS(parse_list("1,x"), ConfigError);
    CHECK_THROWS_AS(parse_list("1,2z"), ConfigError);
    CHECK_THROWS_AS(parse_list(""), ConfigError);
}

TEST_CASE("CSV numbers round-trip") {
    for (double v : {0.1, 1.0 / 3, -2.5e-300, 1e300, 0.0, 123456789.123456789}) CHECK(std::stod(fmt_num(v)) == v);
    CHECK(std::isnan(std::strtod(fmt_num(std::nan("")).c_str(), nullptr)));
    CHECK(std::isinf(std::strtod(fmt_num(std::numeric_limits<double>::infinity()).c_str(), nullptr)));

    const fs::path dir = scratch("csv");
    Manifest mf;
    mf.add("command", "test");
    {
        CsvWriter w((dir / "a.csv").string(), mf, {"x", "y"});
        w.row(std::vector<double>{1.0 / 7, 2.0});
        w.row(std::vector<double>{-3.0, 1e-20});
        CHECK(w.rows_written() == 2);
    }
    const CsvTable t = read_csv((dir / "a.csv").string());
    CHECK(t.manifest.get("command") == "test");
    CHECK(t.header == std::vector<std::string>{"x", "y"});
    CHECK(t.numbers("x") == std::vector<double>{1.0 / 7, -3.0});
    CHECK(t.num(1, t.column("y")) == 1e-20);
    CHECK_THROWS(t.column("z"));
}

TEST_CASE("boundary output is idempotent") {
    const AppConfig c = small_config();
    const fs::path a = scratch("idem_a"), b = scratch("idem_b");
    REQUIRE(cmd_boundary(c, opts(a)) == kOk);
    REQUIRE(cmd_boundary(c, opts(b)) == kOk);
    for (const char* f : {"boundary_dual.csv", "boundary_primal.csv"})
        CHECK(csv_body((a / f).string()) == csv_body((b / f).string()));
    const CsvTable t = read_csv((a / "boundary_dual.csv").string());
    CHECK(t.rows.size() == 2 * 21);
}

TEST_CASE("a one-value sweep reproduces the boundary rows") {
    const AppConfig c = small_config();
    const fs::path a = scratch("sw_a"), b = scratch("sw_b");
    REQUIRE(cmd_boundary(c, opts(a)) == kOk);
    REQUIRE(cmd_sweep(c, opts(b), "delta", {c.params.delta}) == kOk);
    const CsvTable dual = read_csv((a / "boundary_dual.csv").string());
    const CsvTable primal = read_csv((a / "boundary_primal.csv").string());
    const CsvTable sw = read_csv((b / "sweep_delta.csv").string());
    REQUIRE(sw.rows.size() == dual.rows.size());
    const auto bd = sw.numbers("b_dual"), bh = sw.numbers("b_hat"), st = sw.numbers("t");
    const auto d0 = dual.numbers("b_dual"), p0 = primal.numbers("b_hat");
    for (std::size_t i = 0; i < d0.size(); ++i) CHECK(bd[i] == d0[i]);
    // the primal file has no row at t = T, where the sweep writes NaN
    std::size_t j = 0;
    for (std::size_t i = 0; i < bh.size(); ++i) {
        if (st[i] == c.params.horizon) {
            CHECK(std::isnan(bh[i]));
            continue;
        }
        REQUIRE(j < p0.size());
        CHECK(bh[i] == p0[j++]);
    }
    CHECK(j == p0.size());
}

TEST_CASE("value, policy and simulate write their tables") {
    const AppConfig c = small_config();
    const fs::path d = scratch("misc");
    CHECK(cmd_value(c, opts(d)) == kOk);
    CHECK(cmd_policy(c, opts(d)) == kOk);
    CHECK(cmd_simulate(c, opts(d)) == kOk);
    CHECK(read_csv((d / "value_surface.csv").string()).rows.size() == 3 * 4 * 2);
    CHECK(read_csv((d / "policy_grid.csv").string()).rows.size() > 0);
    CHECK(fs::exists(d / "sim_summary.csv"));
}

TEST_CASE("exit codes of the command line tool") {
    const fs::path d = scratch("exit");
    const std::string out = " --out " + d.string() + " -q";
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("boundary --steps 10 --h 5" + out) == kOk);
    CHECK(run_cli("boundary --bogus" + out) == kConfigError);
    CHECK(run_cli("boundary --config /nonexistent.json" + out) == kConfigError);
    CHECK(run_cli("boundary --h 1,x" + out) == kConfigError);
    CHECK(run_cli("boundary --h -3" + out) == kConfigError);
    CHECK(run_cli("sweep --steps 10 --h 5" + out) == kConfigError);
    {
        std::ofstream(d / "bad.json") << R"({"alpha": 2})";
    }
    CHECK(run_cli("boundary --config " + (d / "bad.json").string() + out) == kConfigError);
    {
        std::ofstream(d / "neg.json") << R"({"sim": {"initial_wealth": -1}})";
    }
    CHECK(run_cli("simulate --config " + (d / "neg.json").string() + out) == kConfigError);
    // mortality so steep that the first stage has no bracket
    {
        std::ofstream(d / "solver.json") << R"({"m1": 1e6, "grid": {"n_steps": 10, "h": [0.01]}})";
    }
    CHECK(run_cli("boundary --config " + (d / "solver.json").string() + out) == kSolverError);
}
