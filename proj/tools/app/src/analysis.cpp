#include "hcinv_app/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcinv/health.hpp"
#include "hcinv/parallel.hpp"

namespace hcinv::app {

std::vector<double> primal_curve(const Model& m, const BoundarySurface& surf, std::size_t c) {
    const BoundaryCurve& cv = surf.curves.at(c);
    std::vector<double> out(cv.n() + 1, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k <= cv.n(); ++k)
        out[k] = primal_boundary(m, surf, cv.t_grid[k], cv.health[k]);
    return out;
}

int sign_changes(const std::vector<double>& v, double tol) {
    int changes = 0, last = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double d = v[i] - v[i - 1];
        if (std::abs(d) <= tol) continue;
        const int s = d > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int decreasing_in_t_violations(const std::vector<double>& bhat) {
    int bad = 0;
    for (std::size_t k = 1; k + 1 < bhat.size(); ++k)
        if (!(bhat[k] < bhat[k + 1])) ++bad;
    return bad;
}

double node_average(const std::vector<double>& v) {
    double acc = 0;
    for (std::size_t k = 1; k < v.size(); ++k) acc += v[k];
    return v.size() > 1 ? acc / double(v.size() - 1) : std::numeric_limits<double>::quiet_NaN();
}

int direction_of(const std::vector<double>& metric) {
    if (metric.size() < 2) return 0;
    bool up = true, down = true;
    for (std::size_t i = 1; i < metric.size(); ++i) {
        up = up && metric[i] > metric[i - 1];
        down = down && metric[i] < metric[i - 1];
    }
    return up ? 1 : down ? -1 : 0;
}

int expected_direction(const std::string& param, double h) {
    const bool healthy = h >= 100.0;
    if (param == "h" || param == "alpha") return 1;
    if (param == "delta") return healthy ? -1 : 1;
    if (param == "rho") return healthy ? 1 : -1;
    return 0;
}

const char* direction_name(int d) {
    return d > 0 ? "increasing" : d < 0 ? "decreasing" : "mixed";
}

std::vector<SweepEntry> run_sweep(const AppConfig& cfg, const std::string& param,
                                  const std::vector<double>& values, unsigned threads) {
    const bool known = param == "h" ||
                       std::find(param_keys().begin(), param_keys().end(), param) != param_keys().end();
    if (!known) throw ConfigError("cannot sweep unknown parameter '" + param + "'");
    std::vector<SweepEntry> out(values.size());
    parallel_for(values.size(), threads, [&](std::size_t i) {
        SweepEntry& e = out[i];
        e.value = values[i];
        e.params = cfg.params;
        try {
            std::vector<double> hs = cfg.grid.h;
            if (param == "h")
                hs = {values[i]};
            else
                set_param(e.params, param, values[i]);
            const Model m(e.params);
            e.surface = solve_surface(m, hs, cfg.grid.n_steps, 1);
            for (std::size_t c = 0; c < hs.size(); ++c) e.bhat.push_back(primal_curve(m, *e.surface, c));
        } catch (const std::exception& ex) {
            e.surface.reset();
            e.bhat.clear();
            e.error = ex.what();
        }
    });
    return out;
}

namespace {

DirectionReport summarize(const std::string& param, double h, const std::vector<double>& values,
                          const std::vector<const std::vector<double>*>& curves, int expected) {
    DirectionReport r;
    r.param = param;
    r.h = h;
    r.values = values;
    r.expected = expected;
    for (const auto* c : curves) r.metric.push_back(node_average(*c));
    r.observed = direction_of(r.metric);
    std::size_t agree = 0, total = 0;
    for (std::size_t i = 1; i < curves.size(); ++i) {
        const auto& a = *curves[i - 1];
        const auto& b = *curves[i];
        for (std::size_t k = 1; k < std::min(a.size(), b.size()); ++k) {
            ++total;
            if ((b[k] - a[k]) * expected > 0) ++agree;
        }
    }
    r.pointwise = total ? double(agree) / double(total) : 0.0;
    r.pass = expected != 0 && r.observed == expected;
    return r;
}

}  // namespace

std::vector<DirectionReport> sweep_directions(const std::vector<SweepEntry>& entries,
                                              const std::string& param) {
    std::vector<DirectionReport> out;
    std::vector<const SweepEntry*> ok;
    for (const auto& e : entries)
        if (e.surface) ok.push_back(&e);
    const bool partial = ok.size() != entries.size();
    if (param == "h") {
        std::vector<double> vals;
        std::vector<const std::vector<double>*> curves;
        for (const auto* e : ok) {
            vals.push_back(e->value);
            curves.push_back(&e->bhat[0]);
        }
        DirectionReport r = summarize(param, std::numeric_limits<double>::quiet_NaN(), vals, curves,
                                      expected_direction(param, 0));
        if (partial) {
            r.pass = false;
            r.note = "some sweep values failed";
        }
        out.push_back(r);
        return out;
    }
    if (ok.empty()) return out;
    const auto& hs = ok.front()->surface->h_grid;
    for (std::size_t c = 0; c < hs.size(); ++c) {
        std::vector<double> vals;
        std::vector<const std::vector<double>*> curves;
        for (const auto* e : ok) {
            vals.push_back(e->value);
            curves.push_back(&e->bhat[c]);
        }
        DirectionReport r = summarize(param, hs[c], vals, curves, expected_direction(param, hs[c]));
        if (partial) {
            r.pass = false;
            r.note = "some sweep values failed";
        }
        out.push_back(r);
    }
    return out;
}

OrderingReport consumption_ordering(const Model& m, const BoundarySurface& surf,
                                    const std::vector<double>& hs, const std::vector<double>& ts,
                                    const std::vector<double>& xs) {
    OrderingReport r;
    for (double t : ts) {
        std::vector<PrimalSlice> slices;
        for (double h : hs) slices.emplace_back(m, surf, t, health_pre(m, h, t));
        for (double x : xs) {
            double prev = -1;
            for (std::size_t i = 0; i < slices.size(); ++i) {
                const double c = slices[i].policy(x).c_star;
                if (i > 0) {
                    ++r.checked;
                    const double gap = (c - prev) / std::max(std::abs(prev), 1e-300);
                    r.worst_gap = r.checked == 1 ? gap : std::min(r.worst_gap, gap);
                    if (!(c > prev)) ++r.violations;
                }
                prev = c;
            }
        }
    }
    r.pass = r.checked > 0 && r.violations == 0;
    return r;
}

}  // namespace hcinv::app
