#include "hcinv_app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <json.hpp>

namespace hcinv::app {
namespace {

using nlohmann::json;

void reject_unknown(const json& sec, const char* name, const std::set<std::string>& allowed) {
    for (auto it = sec.begin(); it != sec.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in section '" + name + "'");
}

template <class T>
void take(const json& sec, const char* key, T& dst) {
    if (!sec.contains(key)) return;
    try {
        dst = sec.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

void read_grid(const json& g, GridSection& out) {
    reject_unknown(g, "grid",
                   {"n_steps", "h", "refine", "t_points", "z_points", "z_min", "z_max",
                    "x_points", "x_max", "threads"});
    take(g, "n_steps", out.n_steps);
    take(g, "h", out.h);
    take(g, "refine", out.refine);
    take(g, "t_points", out.t_points);
    take(g, "z_points", out.z_points);
    take(g, "z_min", out.z_min);
    take(g, "z_max", out.z_max);
    take(g, "x_points", out.x_points);
    take(g, "x_max", out.x_max);
    take(g, "threads", out.threads);
    if (out.n_steps < 2) throw ConfigError("grid.n_steps must be at least 2");
    if (out.h.empty()) throw ConfigError("grid.h must not be empty");
    if (out.refine < 1) throw ConfigError("grid.refine must be at least 1");
    if (out.t_points < 2 || out.z_points < 2 || out.x_points < 2)
        throw ConfigError("grid lattices need at least 2 points");
    if (!(out.z_min > 0 && out.z_max > out.z_min)) throw ConfigError("grid z range is empty");
}

void read_sim(const json& s, SimSection& out) {
    reject_unknown(s, "sim",
                   {"n_paths", "n_steps", "seed", "initial_time", "initial_wealth",
                    "initial_health", "policy", "threshold_factor", "exact", "substeps",
                    "trajectories"});
    take(s, "n_paths", out.n_paths);
    take(s, "n_steps", out.n_steps);
    take(s, "seed", out.seed);
    take(s, "initial_time", out.initial_time);
    take(s, "initial_wealth", out.initial_wealth);
    take(s, "initial_health", out.initial_health);
    take(s, "policy", out.policy);
    take(s, "threshold_factor", out.threshold_factor);
    take(s, "exact", out.exact);
    take(s, "substeps", out.substeps);
    take(s, "trajectories", out.trajectories);
    static const std::set<std::string> policies{"optimal", "immediate", "never", "threshold"};
    if (!policies.count(out.policy)) throw ConfigError("sim.policy '" + out.policy + "' is not known");
    if (out.n_paths < 1 || out.n_steps < 2) throw ConfigError("sim needs n_paths >= 1 and n_steps >= 2");
    if (!(out.initial_wealth > 0) || !(out.initial_health > 0))
        throw ConfigError("sim initial_wealth and initial_health must be positive");
    if (!(out.initial_time >= 0)) throw ConfigError("sim.initial_time must be nonnegative");
    if (out.substeps < 1) throw ConfigError("sim.substeps must be at least 1");
}

void read_sweep(const json& s, SweepSection& out) {
    reject_unknown(s, "sweep", {"parameter", "values"});
    take(s, "parameter", out.parameter);
    take(s, "values", out.values);
}

}  // namespace

AppConfig config_from_json(const std::string& text) {
    AppConfig cfg;
    try {
        cfg.params = params_from_json(text, &cfg.defaulted);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const json j = json::parse(text);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_object()) continue;
        if (it.key() == "grid")
            read_grid(it.value(), cfg.grid);
        else if (it.key() == "sim")
            read_sim(it.value(), cfg.sim);
        else if (it.key() == "sweep")
            read_sweep(it.value(), cfg.sweep);
        else
            throw ConfigError("unknown config section '" + it.key() + "'");
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    AppConfig cfg = config_from_json(ss.str());
    cfg.source = path;
    return cfg;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("cannot read number '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw ConfigError("cannot read number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

}  // namespace hcinv::app
