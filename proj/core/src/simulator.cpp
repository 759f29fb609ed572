#include "hcinv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

#include "hcinv/health.hpp"
#include "hcinv/parallel.hpp"

namespace hcinv {

HealthSeries simulate_health_mortality(const Model& m, double h0, double invest_time, int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("simulate_health_mortality: n_steps >= 1 required");
    const double T = m.p().horizon;
    if (!(invest_time >= 0)) throw std::domain_error("simulate_health_mortality: invest_time < 0");
    HealthSeries out;
    const double h_at = health_pre(m, h0, std::min(invest_time, T));
    for (int j = 0; j <= n_steps; ++j) {
        const double t = T * j / n_steps;
        const double h = t <= invest_time ? health_pre(m, h0, t) : health_post(m, h_at, t - invest_time);
        out.t.push_back(t);
        out.health.push_back(h);
        out.mortality.push_back(mortality(m, h));
    }
    return out;
}

namespace {

/// Pre-investment feedback at one time node, tabulated on the continuation side.
struct PolicyTable {
    double b = 0, b_hat = 0, kink_lo = 0, g = 0, k0 = 0, h = 0;
    std::vector<double> x, logz, pi;  // x decreasing

    void build(const PrimalSlice& ps, int points) {
        const DualSlice& d = ps.dual();
        b = d.boundary();
        b_hat = ps.b_hat();
        kink_lo = ps.kink_lo();
        g = d.g();
        k0 = d.k0();
        h = d.h();
        x.clear();
        logz.clear();
        pi.clear();
        for (int i = 0; i < points; ++i) {
            // z from b to b (1 + 1e6), dense near the boundary
            const double q = i == 0 ? 0.0 : std::pow(10.0, -6.0 + 12.0 * (i - 1) / (points - 2));
            const double z = b * (1.0 + q);
            const JValue v = d.eval_continuation(z);
            x.push_back(-v.j_z);
            logz.push_back(std::log(z));
            pi.push_back(z * v.j_zz);  // scaled by theta/sigma later
        }
    }

    struct Hit {
        double z, zjzz, slope;  // slope: d(z J_zz)/dX along the table
    };

    /// z* and z J_zz for wealth X below b_hat.
    Hit lookup(double X) const {
        if (X >= kink_lo) return {b, pi.front(), 0.0};
        if (X <= x.back()) return {std::exp(logz.back()), pi.back(), 0.0};
        // x is decreasing: find i with x[i] >= X > x[i+1]
        auto it = std::lower_bound(x.begin(), x.end(), X, [](double a, double v) { return a > v; });
        const std::size_t i1 = static_cast<std::size_t>(it - x.begin());
        const std::size_t i0 = i1 - 1;
        const double w = (x[i0] - X) / (x[i0] - x[i1]);
        return {std::exp((1 - w) * logz[i0] + w * logz[i1]), (1 - w) * pi[i0] + w * pi[i1],
                (pi[i0] - pi[i1]) / (x[i0] - x[i1])};
    }
};

}  // namespace

PathBundle simulate_closed_loop(const Model& m, const BoundarySurface& surf, const SimConfig& cfg) {
    if (cfg.n_paths < 1 || cfg.n_steps < 2) throw std::invalid_argument("SimConfig: n_paths >= 1 and n_steps >= 2");
    if (cfg.substeps < 1 || cfg.identity_every < 1)
        throw std::invalid_argument("SimConfig: substeps and identity_every must be >= 1");
    const auto& p = m.p();
    const auto& d = m.d();
    const double T = p.horizon, t0 = cfg.initial_time;
    if (!(t0 >= 0 && t0 < T)) throw std::domain_error("SimConfig: initial_time outside [0, T)");
    if (!(cfg.initial_wealth > 0) || !(cfg.initial_health > 0))
        throw std::domain_error("SimConfig: initial wealth and health must be positive");

    const std::size_t N = static_cast<std::size_t>(cfg.n_steps);
    const double dt = (T - t0) / cfg.n_steps;
    std::vector<double> times(N + 1), h_pre(N + 1), g(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        times[j] = j == N ? T : t0 + dt * static_cast<double>(j);
        h_pre[j] = health_pre(m, cfg.initial_health, times[j] - t0);
        g[j] = m.g_value(times[j]);
    }

    // primal slices and tables per node before T
    const bool need_slices = !cfg.passive || cfg.policy == StopPolicy::OptimalBoundary ||
                             cfg.policy == StopPolicy::FixedThreshold || cfg.track_identity;
    std::vector<std::unique_ptr<PrimalSlice>> slices(N);
    std::vector<PolicyTable> tables(N);
    if (need_slices) {
        parallel_for(N, cfg.threads, [&](std::size_t j) {
            slices[j] = std::make_unique<PrimalSlice>(m, surf, times[j], h_pre[j]);
            if (!cfg.exact_policy) tables[j].build(*slices[j], cfg.table_points);
        });
    }

    // post-investment time factors, one profile per possible investment step
    const bool may_invest = cfg.policy != StopPolicy::NeverInvest;
    std::vector<std::unique_ptr<PostProfile>> post(N);
    if (may_invest) {
        parallel_for(N, cfg.threads, [&](std::size_t k) {
            std::vector<double> edges(N - k + 1);
            for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = times[k + i] - times[k];
            post[k] = std::make_unique<PostProfile>(m, h_pre[k], edges);
        });
    }

    PathBundle out;
    out.n_paths = cfg.n_paths;
    out.n_steps = N;
    out.times = times;
    const std::size_t S = cfg.keep_series ? cfg.n_paths * (N + 1) : 0;
    for (auto* v : {&out.brownian, &out.health, &out.mortality, &out.wealth, &out.dual, &out.consumption,
                    &out.allocation})
        v->assign(S, 0.0);
    out.invest_time.assign(cfg.n_paths, std::numeric_limits<double>::quiet_NaN());
    out.invest_step.assign(cfg.n_paths, -1);
    out.terminal_wealth.assign(cfg.n_paths, 0.0);
    out.path_welfare.assign(cfg.n_paths, 0.0);
    out.identity_error.assign(cfg.n_paths, 0.0);
    out.absorbed.assign(cfg.n_paths, 0);

    const double ts = d.theta / p.sigma;
    const double th2 = d.theta * d.theta;
    const double sub_dt = dt / cfg.substeps;

    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t path) {
        std::mt19937_64 eng(cfg.seed ^ static_cast<std::uint64_t>(path));
        std::normal_distribution<double> nd;
        double X = cfg.initial_wealth, B = 0.0, Z = 0.0, cum_m = 0.0, welfare = 0.0;
        double z_guess = 0.0, max_err = 0.0;
        bool invested = false, dead = false;
        std::size_t inv = 0;
        double prev_m = 0.0;

        for (std::size_t j = 0; j <= N; ++j) {
            const double H = invested ? post[inv]->health(j - inv) : h_pre[j];
            const double M = mortality(m, H);
            if (j > 0) cum_m += 0.5 * dt * (prev_m + M);
            prev_m = M;
            const double disc = std::exp(-p.rho * (times[j] - t0) - cum_m);

            if (!dead && ((!invested && X <= 0) || (invested && j < N && X <= g[j]))) dead = true;

            double c = 0, pi = 0, slope = 0;  // slope: d(pi)/dX for the Milstein term
            if (j < N && !dead) {
                if (!invested) {
                    bool go = false;
                    switch (cfg.policy) {
                        case StopPolicy::OptimalBoundary: go = X >= slices[j]->b_hat(); break;
                        case StopPolicy::FixedThreshold: go = X >= cfg.threshold_factor * slices[j]->b_hat(); break;
                        case StopPolicy::InvestImmediately: go = true; break;
                        case StopPolicy::NeverInvest: go = false; break;
                    }
                    if (go) {
                        if (X <= g[j]) {
                            dead = true;
                        } else {
                            invested = true;
                            inv = j;
                            out.invest_step[path] = static_cast<int>(j);
                            out.invest_time[path] = times[j];
                        }
                    }
                }
                if (!dead && !invested) {
                    double z = 0, zjzz = 0, dzjzz = 0;
                    if (need_slices) {
                        if (cfg.exact_policy) {
                            const PolicyEval pe = slices[j]->policy(X, z_guess);
                            z = pe.z_star;
                            const DualSlice& ds = slices[j]->dual();
                            zjzz = d.theta == 0 ? z * ds.eval_continuation(z).j_zz : pe.pi_star / ts;
                            if (cfg.milstein && !pe.at_kink && !pe.invest_now) {
                                // d(z J_zz)/dX = (J_zz + z J_zzz) dz*/dX with dz*/dX = -1/J_zz
                                const double e = 1e-4 * z;
                                const double up = (z + e) * ds.eval_continuation(z + e).j_zz;
                                const double dn = (z - e) * ds.eval_continuation(z - e).j_zz;
                                dzjzz = -(up - dn) / (2 * e) * z / zjzz;
                            } else if (pe.invest_now) {
                                dzjzz = 1.0 / (1.0 - p.alpha);
                            }
                        } else if (X >= tables[j].b_hat) {
                            z = post_investment_dual(m, X - tables[j].g, tables[j].k0);
                            zjzz = (X - tables[j].g) / (1.0 - p.alpha);
                            dzjzz = 1.0 / (1.0 - p.alpha);
                        } else {
                            const PolicyTable::Hit hit = tables[j].lookup(X);
                            z = hit.z;
                            zjzz = hit.zjzz;
                            dzjzz = hit.slope;
                        }
                        z_guess = z;
                    }
                    if (j == 0) Z = z;
                    if (!cfg.passive) {
                        c = inverse_marginal_utility(m, z, H);
                        pi = ts * zjzz;
                        slope = ts * dzjzz;
                    }
                    if (cfg.track_identity && Z > 0 && j % cfg.identity_every == 0) {
                        const double err = std::abs(X + slices[j]->dual().eval(Z).j_z);
                        max_err = std::max(max_err, err);
                    }
                } else if (!dead) {
                    const double k0 = post[inv]->tail_k0(j - inv);
                    if (j == inv) Z = post_investment_dual(m, X - g[j], k0);
                    if (!cfg.passive) {
                        c = H * (X - g[j]) / k0;
                        pi = d.theta * (X - g[j]) / (p.sigma * (1.0 - p.alpha));
                        slope = d.theta / (p.sigma * (1.0 - p.alpha));
                    }
                }
            }
            if (j < N) welfare += disc * utility(m, c, H) * dt;

            if (cfg.keep_series) {
                const std::size_t k = path * (N + 1) + j;
                out.brownian[k] = B;
                out.health[k] = H;
                out.mortality[k] = M;
                out.wealth[k] = X;
                out.dual[k] = Z;
                out.consumption[k] = c;
                out.allocation[k] = pi;
            }
            if (j == N) break;

            double dB = 0;
            for (int q = 0; q < cfg.substeps; ++q) dB += std::sqrt(sub_dt) * nd(eng);
            if (!dead) {
                X += (p.r * X + pi * (p.mu - p.r) - c - (invested ? p.invest_amount : 0.0)) * dt + pi * p.sigma * dB;
                if (cfg.milstein) X += 0.5 * p.sigma * p.sigma * pi * slope * (dB * dB - dt);
                if (invested) {
                    const double dim = post[inv]->im2(j + 1 - inv) - post[inv]->im2(j - inv);
                    Z *= std::exp((p.rho - p.r - 0.5 * th2) * dt + dim - d.theta * dB);
                } else {
                    const double dim = integrated_mortality_pre(m, cfg.initial_health, times[j + 1] - t0) -
                                       integrated_mortality_pre(m, cfg.initial_health, times[j] - t0);
                    Z *= std::exp((p.rho - p.r - 0.5 * th2) * dt + dim - d.theta * dB);
                }
            }
            B += dB;
        }
        out.terminal_wealth[path] = X;
        out.path_welfare[path] = welfare;
        out.identity_error[path] = max_err;
        out.absorbed[path] = dead ? 1 : 0;
    });
    for (auto a : out.absorbed) out.n_absorbed += a;
    return out;
}

WelfareEstimate welfare_estimate(const Model& m, const PathBundle& b) {
    const std::size_t n = b.n_paths;
    std::vector<double> w(n, 0.0);
    if (!b.consumption.empty()) {
        const double rho = m.p().rho;
        for (std::size_t i = 0; i < n; ++i) {
            double cum = 0, acc = 0;
            for (std::size_t j = 0; j < b.n_steps; ++j) {
                const double dt = b.times[j + 1] - b.times[j];
                const double disc = std::exp(-rho * (b.times[j] - b.times[0]) - cum);
                acc += disc * utility(m, b.at(b.consumption, i, j), b.at(b.health, i, j)) * dt;
                cum += 0.5 * dt * (b.at(b.mortality, i, j) + b.at(b.mortality, i, j + 1));
            }
            w[i] = acc;
        }
    } else {
        w = b.path_welfare;
    }
    WelfareEstimate e;
    double s1 = 0, s2 = 0;
    for (double v : w) {
        s1 += v;
        s2 += v * v;
    }
    const double nn = static_cast<double>(n);
    e.estimate = s1 / nn;
    if (n > 1) e.std_error = std::sqrt(std::max(0.0, (s2 - nn * e.estimate * e.estimate) / (nn - 1)) / nn);
    return e;
}

}  // namespace hcinv
