#include "hcinv_app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <json.hpp>

#include "hcinv/health.hpp"
#include "hcinv/parallel.hpp"
#include "hcinv/simulator.hpp"
#include "hcinv_app/analysis.hpp"
#include "hcinv_app/checks.hpp"

#ifndef HCINV_VERSION
#define HCINV_VERSION "unknown"
#endif

namespace hcinv::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::vector<double>& v, const char* sep = ";") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + fmt_num(v[i]);
    return s;
}

std::string out_path(const RunOptions& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    return (fs::path(opt.out_dir) / name).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

std::ostream& log(const RunOptions& opt) {
    static std::ostream null(nullptr);
    return opt.log ? *opt.log : null;
}

unsigned threads_of(const AppConfig& cfg, const RunOptions& opt) {
    return resolve_threads(opt.threads ? opt.threads : cfg.grid.threads);
}

BoundarySurface solve(const Model& m, const AppConfig& cfg, const RunOptions& opt) {
    auto hs = cfg.grid.h;
    std::sort(hs.begin(), hs.end());
    return solve_surface(m, hs, cfg.grid.n_steps, threads_of(cfg, opt));
}

std::vector<double> log_space(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return v;
}

}  // namespace

Manifest make_manifest(const AppConfig& cfg, const RunOptions& opt, const std::string& sub) {
    Manifest mf;
    mf.add("tool", "hcinv");
    mf.add("version", HCINV_VERSION);
    mf.add("subcommand", sub);
    mf.add("config", cfg.source.empty() ? "(defaults)" : cfg.source);
    mf.add("output_dir", opt.out_dir);
    std::string grid = "n_steps=" + std::to_string(cfg.grid.n_steps) + ";h=" + join(cfg.grid.h, "|") +
                       ";refine=" + std::to_string(cfg.grid.refine);
    mf.add("grid", grid);
    mf.add("seed", std::to_string(cfg.sim.seed));
    std::string params;
    for (const auto& k : param_keys())
        params += (params.empty() ? "" : ";") + k + "=" + fmt_num(get_param(cfg.params, k));
    mf.add("params", params);
    if (opt.timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        mf.add("timestamp", buf);
    }
    return mf;
}

int cmd_boundary(const AppConfig& cfg, const RunOptions& opt) {
    const Model m(cfg.params);
    const auto t0 = std::chrono::steady_clock::now();
    BoundarySurface surf = solve(m, cfg, opt);
    parallel_for(surf.curves.size(), threads_of(cfg, opt),
                 [&](std::size_t c) { fill_residuals(m, surf.curves[c], cfg.grid.refine); });
    const Manifest mf = make_manifest(cfg, opt, "boundary");

    CsvWriter dual(out_path(opt, "boundary_dual.csv"), mf, {"h", "t", "xi", "b_dual", "residual"});
    for (const auto& c : surf.curves)
        for (std::size_t k = 0; k <= c.n(); ++k)
            dual.row({c.h_ref, c.t_grid[k], c.xi_grid[k], c.values[k], c.residuals[k]});

    CsvWriter primal(out_path(opt, "boundary_primal.csv"), mf, {"h", "t", "health", "b_hat", "g"});
    json report = json::array();
    for (std::size_t ci = 0; ci < surf.curves.size(); ++ci) {
        const auto& c = surf.curves[ci];
        const auto bhat = primal_curve(m, surf, ci);
        for (std::size_t k = 1; k <= c.n(); ++k)
            primal.row({c.h_ref, c.t_grid[k], c.health[k], bhat[k], m.g_value(c.t_grid[k])});
        const double bmax = *std::max_element(c.values.begin(), c.values.end());
        const int changes = sign_changes(c.values, 1e-12 * bmax);
        const int viol = decreasing_in_t_violations(bhat);
        double worst_res = 0;
        for (std::size_t k = 1; k <= c.n(); ++k)
            worst_res = std::max(worst_res, std::abs(c.residuals[k]) /
                                                (cfg.params.invest_amount * c.values[k] / cfg.params.r));
        report.push_back({{"h", c.h_ref},
                          {"dual_sign_changes", changes},
                          {"dual_nonmonotone_in_t", changes > 0},
                          {"primal_decreasing_violations", viol},
                          {"primal_decreasing_in_t", viol == 0},
                          {"max_scaled_residual", worst_res}});
        log(opt) << "h=" << c.h_ref << ": dual boundary " << (changes > 0 ? "nonmonotone" : "monotone")
                 << " in t (" << changes << " turns); primal boundary "
                 << (viol == 0 ? "decreasing" : "not decreasing") << " in t (" << viol
                 << " violations)\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(out_path(opt, "boundary_report.json"), {{"curves", report}, {"n_steps", cfg.grid.n_steps}});
    log(opt) << "boundary: " << surf.curves.size() << " curves, n=" << cfg.grid.n_steps << ", "
             << secs << " s\n";
    return kOk;
}

int cmd_sweep(const AppConfig& cfg, const RunOptions& opt, const std::string& param,
              const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    const auto entries = run_sweep(cfg, param, values, threads_of(cfg, opt));
    const Manifest mf = make_manifest(cfg, opt, "sweep " + param + "=" + join(values, "|"));
    CsvWriter out(out_path(opt, "sweep_" + param + ".csv"), mf,
                  {"value", "h", "t", "xi", "b_dual", "b_hat"});
    json errors = json::array();
    std::size_t ok = 0;
    for (const auto& e : entries) {
        if (!e.surface) {
            errors.push_back({{"value", e.value}, {"error", e.error}});
            log(opt) << "sweep " << param << "=" << e.value << " failed: " << e.error << '\n';
            continue;
        }
        ++ok;
        for (std::size_t ci = 0; ci < e.surface->curves.size(); ++ci) {
            const auto& c = e.surface->curves[ci];
            for (std::size_t k = 0; k <= c.n(); ++k)
                out.row({e.value, c.h_ref, c.t_grid[k], c.xi_grid[k], c.values[k], e.bhat[ci][k]});
        }
    }
    json dirs = json::array();
    if (entries.size() > 1) {
        for (const auto& r : sweep_directions(entries, param)) {
            dirs.push_back({{"h", std::isnan(r.h) ? json(nullptr) : json(r.h)},
                            {"values", r.values},
                            {"mean_b_hat", r.metric},
                            {"observed", direction_name(r.observed)},
                            {"expected", direction_name(r.expected)},
                            {"pointwise_agreement", r.pointwise},
                            {"pass", r.pass},
                            {"note", r.note}});
            log(opt) << "sweep " << param;
            if (!std::isnan(r.h)) log(opt) << " h=" << r.h;
            log(opt) << ": boundary " << direction_name(r.observed) << " (expected "
                     << direction_name(r.expected) << ", pointwise " << r.pointwise << ") "
                     << (r.pass ? "PASS" : "FAIL") << '\n';
        }
    }
    write_json(out_path(opt, "sweep_" + param + "_report.json"),
               {{"parameter", param}, {"values", values}, {"directions", dirs}, {"errors", errors}});
    return ok > 0 ? kOk : kSolverError;
}

int cmd_value(const AppConfig& cfg, const RunOptions& opt) {
    const Model m(cfg.params);
    const BoundarySurface surf = solve(m, cfg, opt);
    const double T = cfg.params.horizon;
    std::vector<double> ts(cfg.grid.t_points);
    for (int i = 0; i < cfg.grid.t_points; ++i) ts[i] = i == cfg.grid.t_points - 1 ? T : T * i / (cfg.grid.t_points - 1);
    const auto zs = log_space(cfg.grid.z_min, cfg.grid.z_max, cfg.grid.z_points);
    const auto& hs = surf.h_grid;

    std::vector<std::vector<double>> rows(hs.size() * ts.size() * zs.size());
    parallel_for(hs.size() * ts.size(), threads_of(cfg, opt), [&](std::size_t idx) {
        const std::size_t ih = idx / ts.size(), it = idx % ts.size();
        const double h = health_pre(m, hs[ih], ts[it]);
        const DualSlice sl(m, surf, ts[it], h);
        for (std::size_t iz = 0; iz < zs.size(); ++iz) {
            const JValue v = sl.eval(zs[iz]);
            rows[idx * zs.size() + iz] = {ts[it], zs[iz], h, v.j_hat, v.j, v.j_z, v.j_zz, sl.boundary()};
        }
    });
    const Manifest mf = make_manifest(cfg, opt, "value");
    CsvWriter out(out_path(opt, "value_surface.csv"), mf,
                  {"t", "z", "h", "j_hat", "j", "j_z", "j_zz", "boundary"});
    for (const auto& r : rows) out.row(r);

    if (opt.mc_paths > 0) {
        CsvWriter mc(out_path(opt, "mc_diagnostics.csv"), mf,
                     {"point_id", "t", "z", "h", "estimate", "se", "quadrature", "n_paths", "seed"});
        std::size_t id = 0;
        for (double h0 : hs)
            for (double q : {1.5, 2.0, 4.0}) {
                const double b = boundary_value(m, surf, 0.0, h0);
                const DualPoint p{0.0, q * b, h0};
                const auto e = mc_j_hat(m, surf, p, opt.mc_paths, 2 * cfg.grid.n_steps,
                                        cfg.sim.seed + id, 1.0, threads_of(cfg, opt));
                mc.row({double(id), p.t, p.z, p.h, e.estimate, e.std_error, j_hat(m, surf, p),
                        double(opt.mc_paths), double(cfg.sim.seed + id)});
                ++id;
            }
    }
    log(opt) << "value: " << rows.size() << " lattice points\n";
    return kOk;
}

int cmd_policy(const AppConfig& cfg, const RunOptions& opt) {
    const Model m(cfg.params);
    const BoundarySurface surf = solve(m, cfg, opt);
    const double T = cfg.params.horizon;
    const auto& hs = surf.h_grid;
    std::vector<double> ts(cfg.grid.t_points);
    for (int i = 0; i < cfg.grid.t_points; ++i) ts[i] = T * i / cfg.grid.t_points;

    double x_max = cfg.grid.x_max;
    if (!(x_max > 0)) {
        for (double h0 : hs)
            for (double t : ts) x_max = std::max(x_max, 2.0 * primal_boundary(m, surf, t, health_pre(m, h0, t)));
    }
    std::vector<double> xs(cfg.grid.x_points);
    for (int i = 0; i < cfg.grid.x_points; ++i) xs[i] = x_max * (i + 1) / cfg.grid.x_points;

    std::vector<std::vector<double>> rows(hs.size() * ts.size() * xs.size());
    parallel_for(hs.size() * ts.size(), threads_of(cfg, opt), [&](std::size_t idx) {
        const std::size_t ih = idx / ts.size(), it = idx % ts.size();
        const double h = health_pre(m, hs[ih], ts[it]);
        const PrimalSlice sl(m, surf, ts[it], h);
        double guess = 0;
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const PolicyEval e = sl.policy(xs[ix], guess);
            guess = e.z_star;
            rows[idx * xs.size() + ix] = {ts[it], xs[ix], h, e.z_star, e.v, e.c_star, e.pi_star,
                                          e.invest_now ? 1.0 : 0.0, sl.b_hat()};
        }
    });
    const Manifest mf = make_manifest(cfg, opt, "policy");
    CsvWriter out(out_path(opt, "policy_grid.csv"), mf,
                  {"t", "x", "h", "z_star", "v", "c_star", "pi_star", "invest_now", "b_hat"});
    for (const auto& r : rows) out.row(r);

    json rep = {{"x_max", x_max}};
    std::vector<double> sick;
    for (double h0 : hs)
        if (h0 < 100.0) sick.push_back(h0);
    if (sick.size() >= 2) {
        const OrderingReport o = consumption_ordering(m, surf, sick, ts, xs);
        rep["sick_consumption_ordered_by_h"] = {{"h", sick},
                                                {"checked", o.checked},
                                                {"violations", o.violations},
                                                {"worst_relative_step", o.worst_gap},
                                                {"pass", o.pass}};
        log(opt) << "policy: sick-agent consumption " << (o.pass ? "increases" : "does not increase")
                 << " with h at " << o.checked - o.violations << "/" << o.checked << " points "
                 << (o.pass ? "PASS" : "FAIL") << '\n';
    }
    write_json(out_path(opt, "policy_report.json"), rep);
    log(opt) << "policy: " << rows.size() << " grid points\n";
    return kOk;
}

int cmd_simulate(const AppConfig& cfg, const RunOptions& opt) {
    const Model m(cfg.params);
    const auto& s = cfg.sim;
    // one curve along the characteristic of the starting point
    const double h_ref = s.initial_health * std::exp(cfg.params.delta * s.initial_time);
    const BoundarySurface surf = solve_surface(m, {h_ref}, cfg.grid.n_steps, 1);

    SimConfig sc;
    sc.n_paths = s.n_paths;
    sc.n_steps = s.n_steps;
    sc.seed = s.seed;
    sc.initial_time = s.initial_time;
    sc.initial_wealth = s.initial_wealth;
    sc.initial_health = s.initial_health;
    sc.threshold_factor = s.threshold_factor;
    sc.exact_policy = s.exact;
    sc.substeps = s.substeps;
    sc.keep_series = true;
    sc.threads = threads_of(cfg, opt);
    if (s.policy == "optimal") sc.policy = StopPolicy::OptimalBoundary;
    else if (s.policy == "immediate") sc.policy = StopPolicy::InvestImmediately;
    else if (s.policy == "never") sc.policy = StopPolicy::NeverInvest;
    else sc.policy = StopPolicy::FixedThreshold;

    const PathBundle b = simulate_closed_loop(m, surf, sc);
    const Manifest mf = make_manifest(cfg, opt, "simulate");
    {
        CsvWriter out(out_path(opt, "sim_summary.csv"), mf,
                      {"path_id", "invest_time", "terminal_wealth", "welfare", "absorbed"});
        for (std::size_t i = 0; i < b.n_paths; ++i)
            out.row({double(i), b.invest_time[i], b.terminal_wealth[i], b.path_welfare[i], double(b.absorbed[i])});
    }
    if (s.trajectories) {
        CsvWriter out(out_path(opt, "sim_paths.csv"), mf,
                      {"path_id", "t", "brownian", "health", "mortality", "wealth", "dual", "consumption",
                       "allocation"});
        // at most 1000 rows per path, always keeping t = T
        const std::size_t stride = std::max<std::size_t>(1, (b.n_steps + 998) / 999);
        std::vector<std::size_t> keep;
        for (std::size_t j = 0; j < b.n_steps; j += stride) keep.push_back(j);
        keep.push_back(b.n_steps);
        for (std::size_t i = 0; i < b.n_paths; ++i)
            for (std::size_t j : keep)
                out.row({double(i), b.times[j], b.at(b.brownian, i, j), b.at(b.health, i, j),
                         b.at(b.mortality, i, j), b.at(b.wealth, i, j), b.at(b.dual, i, j),
                         b.at(b.consumption, i, j), b.at(b.allocation, i, j)});
    }
    const WelfareEstimate w = welfare_estimate(m, b);
    std::vector<double> inv;
    for (double t : b.invest_time)
        if (!std::isnan(t)) inv.push_back(t);
    std::sort(inv.begin(), inv.end());
    const double median = inv.empty() ? std::numeric_limits<double>::quiet_NaN() : inv[inv.size() / 2];
    write_json(out_path(opt, "sim_report.json"),
               {{"welfare", w.estimate},
                {"welfare_se", w.std_error},
                {"n_paths", b.n_paths},
                {"n_invested", inv.size()},
                {"median_invest_time", inv.empty() ? json(nullptr) : json(median)},
                {"n_absorbed", b.n_absorbed}});
    log(opt) << "simulate: welfare " << w.estimate << " +/- " << w.std_error << ", " << inv.size() << "/"
             << b.n_paths << " invested, " << b.n_absorbed << " absorbed\n";
    return kOk;
}

int cmd_verify(const AppConfig& cfg, const RunOptions& opt) {
    CheckSettings s;
    s.full = opt.full;
    s.threads = threads_of(cfg, opt);
    s.seed = cfg.sim.seed;
    s.scratch_dir = (fs::path(opt.out_dir) / "verify_scratch").string();
    s.log = opt.log;
    const auto results = run_acceptance(cfg.params, s);
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    std::ofstream(out_path(opt, "verify_report.json")) << results_json(results, s) << '\n';
    if (!all) {
        log(opt) << "failing:";
        for (const auto& r : results)
            if (!r.pass) log(opt) << ' ' << r.id;
        log(opt) << '\n';
    }
    return all ? kOk : kVerifyFailed;
}

}  // namespace hcinv::app
