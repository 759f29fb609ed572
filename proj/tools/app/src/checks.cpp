#include "hcinv_app/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>

#include "hcinv/health.hpp"
#include "hcinv/simulator.hpp"
#include "hcinv_app/analysis.hpp"
#include "hcinv_app/commands.hpp"

namespace hcinv::app {
namespace {

namespace fs = std::filesystem;

/// Grid sizes and sample counts. `full` follows the criteria text.
struct Sizes {
    std::size_t w_paths;
    int w_steps;
    int n_boundary;
    int n_conv[3];
    std::size_t stop_paths;
    int stop_steps;
    int id_boundary;
    int id_steps;
    std::size_t id_paths;
    int v_grid;
};

Sizes sizes_for(bool full) {
    if (full) return {100000, 400, 200, {100, 200, 400}, 10000, 400, 200, 200, 100, 10000};
    return {20000, 200, 50, {25, 50, 100}, 2000, 200, 50, 50, 20, 2000};
}

std::string num(double v, int prec = 4) {
    std::ostringstream o;
    o << std::setprecision(prec) << v;
    return o.str();
}

class Context {
public:
    Context(const ModelParams& p, const CheckSettings& s) : m(p), s(s), z(sizes_for(s.full)) {}

    const BoundarySurface& surface(int n, const std::vector<double>& hs = {2.0, 1000.0}) {
        auto key = std::make_pair(n, hs);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, solve_surface(m, hs, n, s.threads)).first;
        return it->second;
    }

    Model m;
    CheckSettings s;
    Sizes z;

private:
    std::map<std::pair<int, std::vector<double>>, BoundarySurface> cache_;
};

// Extended-precision W and W_h straight from their integral definitions,
// valid for any tau >= 0 so that centered differences in t can straddle
// t = 0. Long double keeps the pinned 1e-5 step clear of roundoff: at
// h = 1000, W_hh / W_h is about 1e-11.
struct WOracle {
    long double w, w_h;
};

WOracle w_oracle(const Model& m, double t, double z, double h) {
    using LD = long double;
    using GL = boost::math::quadrature::gauss<LD, 20>;
    // full 20-point rule on [-1, 1] from the stored half
    static const auto rule = [] {
        std::vector<std::pair<LD, LD>> r;
        const auto& x = GL::abscissa();
        const auto& w = GL::weights();
        for (std::size_t i = 0; i < x.size(); ++i) {
            r.emplace_back(x[i], w[i]);
            if (x[i] != 0) r.emplace_back(-x[i], w[i]);
        }
        return r;
    }();
    const auto& p = m.p();
    const auto& d = m.d();
    const LD delta = p.delta, kappa = p.kappa, f = d.f_of_I;
    auto health = [&](LD s) { return LD(h) * std::exp(-delta * s) - f / delta * std::expm1(-delta * s); };
    // integrated mortality and the h-sensitivity integral over [lo, hi]
    auto inner = [&](LD lo, LD hi) {
        const LD c = (lo + hi) / 2, r = (hi - lo) / 2;
        LD im = 0, k = 0;
        for (const auto& [x, w] : rule) {
            const LD u = c + r * x, hk = std::pow(health(u), -kappa);
            im += w * (LD(p.m0) + LD(p.m1) * hk);
            k += w * hk / health(u) * std::exp(-delta * u);
        }
        return std::make_pair(im * r, k * r);
    };
    const LD tau = LD(p.horizon) - LD(t);
    const int panels = std::max(1, static_cast<int>(std::ceil(static_cast<double>(tau) / 0.5)));
    LD k0 = 0, gam = 0, im_cum = 0, k_cum = 0;
    for (int i = 0; i < panels; ++i) {
        const LD lo = tau * i / panels, hi = tau * (i + 1) / panels;
        const LD c = (lo + hi) / 2, r = (hi - lo) / 2;
        for (const auto& [x, w] : rule) {
            const LD s = c + r * x;
            const auto [im, k] = inner(lo, s);
            const LD ae = std::exp(LD(d.lam_a) * s + (LD(p.rho) * s + im_cum + im) / (LD(p.alpha) - 1));
            const LD h2 = health(s);
            k0 += r * w * ae * h2;
            gam += r * w * ae * (LD(d.beta_p) * (k_cum + k) * h2 + std::exp(-delta * s));
        }
        const auto [im, k] = inner(lo, hi);
        im_cum += im;
        k_cum += k;
    }
    const LD za = std::pow(LD(z), LD(d.a));
    return {LD(d.C) * za * k0, LD(d.C) * za * gam};
}

// ---------------------------------------------------------------- 1
CheckResult c1_w_monte_carlo(Context& cx) {
    CheckResult r{1, "closed-form W agrees with Monte Carlo", false, "", 0, 60};
    const Model& m = cx.m;
    const auto& p = m.p();
    const auto& d = m.d();
    const int N = cx.z.w_steps;
    const double T = p.horizon, dt = T / N;
    bool ok = true;
    double worst = 0;
    std::size_t case_id = 0;
    for (double h : {2.0, 1000.0}) {
        // deterministic factors on the time grid; mortality integral by adaptive Simpson
        std::vector<double> base(N + 1);
        for (int j = 0; j <= N; ++j) {
            const double s = dt * j;
            const double im = integrated_mortality_post(m, h, s);
            const double H = health_post(m, h, s);
            const double w = (j == 0 || j == N) ? 0.5 * dt : dt;
            // e^{-rho s - im} (1-alpha) (Z/alpha)^a H with the Brownian factor split off
            base[j] = w * std::exp(-p.rho * s - im) * (1 - p.alpha) * std::pow(p.alpha, -d.a) * H *
                      std::exp(d.a * ((p.rho - p.r - 0.5 * d.theta * d.theta) * s + im));
        }
        for (double zz : {0.5, 1.0, 2.0}) {
            const double za = std::pow(zz, d.a);
            double s1 = 0, s2 = 0;
            for (std::size_t i = 0; i < cx.z.w_paths; ++i) {
                std::mt19937_64 eng((cx.s.seed + 7919 * case_id) ^ i);
                std::normal_distribution<double> nd;
                double B = 0, acc = base[0];
                const double sq = std::sqrt(dt);
                for (int j = 1; j <= N; ++j) {
                    B += sq * nd(eng);
                    acc += base[j] * std::exp(-d.a * d.theta * B);
                }
                acc *= za;
                s1 += acc;
                s2 += acc * acc;
            }
            const double n = double(cx.z.w_paths);
            const double mean = s1 / n;
            const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
            const double w = W_value(m, {0.0, zz, h});
            const double zsc = std::abs(w - mean) / se;
            worst = std::max(worst, zsc);
            ok = ok && zsc <= 3.0;
            ++case_id;
        }
    }
    r.pass = ok;
    r.measured = "max |W - MC|/SE = " + num(worst) + " over 6 points, " + std::to_string(cx.z.w_paths) +
                 " paths (limit 3)";
    return r;
}

// ---------------------------------------------------------------- 2
CheckResult c2_derivatives(Context& cx) {
    CheckResult r{2, "W partial derivatives match centered differences", false, "", 0, 10};
    const Model& m = cx.m;
    double worst = 0;
    std::string where;
    for (double t : {0.0, 10.0, 19.0})
        for (double z : {0.5, 1.0, 2.0})
            for (double h : {2.0, 100.0, 1000.0}) {
                const WDerivBundle a = W_partials(m, {t, z, h});
                const double et = 1e-5 * (1 + std::abs(t)), ez = 1e-5 * (1 + z), eh = 1e-5 * (1 + h);
                auto fw = [&](double tt, double zz, double hh) { return w_oracle(m, tt, zz, hh).w; };
                auto fh = [&](double tt, double zz, double hh) { return w_oracle(m, tt, zz, hh).w_h; };
                const double fd[6] = {
                    static_cast<double>((fw(t, z + ez, h) - fw(t, z - ez, h)) / (2 * ez)),
                    static_cast<double>((fw(t, z, h + eh) - fw(t, z, h - eh)) / (2 * eh)),
                    static_cast<double>((fw(t + et, z, h) - fw(t - et, z, h)) / (2 * et)),
                    static_cast<double>((fh(t, z, h + eh) - fh(t, z, h - eh)) / (2 * eh)),
                    static_cast<double>((fh(t, z + ez, h) - fh(t, z - ez, h)) / (2 * ez)),
                    static_cast<double>((fh(t + et, z, h) - fh(t - et, z, h)) / (2 * et))};
                const double an[6] = {a.w_z, a.w_h, a.w_t, a.w_hh, a.w_hz, a.w_ht};
                static const char* names[6] = {"W_z", "W_h", "W_t", "W_hh", "W_hz", "W_ht"};
                for (int i = 0; i < 6; ++i) {
                    const double rel = std::abs(fd[i] - an[i]) / std::abs(an[i]);
                    if (!(rel <= worst)) {
                        worst = rel;
                        where = std::string(names[i]) + " at (" + num(t) + "," + num(z) + "," + num(h) + ")";
                    }
                }
            }
    r.pass = worst <= 1e-4;
    r.measured = "max relative error " + num(worst, 3) + " (" + where + "), limit 1e-4";
    return r;
}

// ---------------------------------------------------------------- 3
CheckResult c3_pde_residual(Context& cx) {
    CheckResult r{3, "W satisfies its PDE", false, "", 0, 0};
    const Model& m = cx.m;
    const auto& p = m.p();
    const auto& d = m.d();
    double worst = 0;
    for (double t : {0.0, 10.0, 19.0})
        for (double z : {0.5, 1.0, 2.0})
            for (double h : {2.0, 100.0, 1000.0}) {
                const WDerivBundle w = W_partials(m, {t, z, h});
                const double M = mortality(m, h);
                const double terms[6] = {w.w_t,
                                         0.5 * d.theta * d.theta * z * z * w.w_zz,
                                         (p.rho - p.r + M) * z * w.w_z,
                                         (-p.delta * h + d.f_of_I) * w.w_h,
                                         -(p.rho + M) * w.w,
                                         u_hat(m, z, h)};
                double sum = 0, big = 0;
                for (double v : terms) {
                    sum += v;
                    big = std::max(big, std::abs(v));
                }
                worst = std::max(worst, std::abs(sum) / big);
            }
    r.pass = worst <= 1e-6;
    r.measured = "max residual / largest term " + num(worst, 3) + " at 27 points, limit 1e-6";
    return r;
}

// ---------------------------------------------------------------- 4
CheckResult c4_boundary_validity(Context& cx) {
    CheckResult r{4, "boundary terminal value, upper bound and residual", false, "", 0, 240};
    const Model& m = cx.m;
    const double I = m.p().invest_amount, rr = m.p().r;
    bool ok = true;
    std::ostringstream o;
    for (double h : {2.0, 1000.0}) {
        const BoundaryCurve& c = cx.surface(cx.z.n_boundary).curves[h == 2.0 ? 0 : 1];
        const auto res = all_residuals(m, c, 4);
        int above = 0, bad = 0;
        double worst = 0;
        std::size_t worst_k = 0;
        for (std::size_t k = 1; k <= c.n(); ++k) {
            if (c.values[k] > c.upper[k]) ++above;
            const double ratio = std::abs(res[k]) / (1e-4 * I * c.values[k] / rr);
            if (ratio > 1) ++bad;
            if (ratio > worst) {
                worst = ratio;
                worst_k = k;
            }
        }
        const bool pass = c.values[0] == 0.0 && above == 0 && bad == 0;
        ok = ok && pass;
        o << "h=" << h << ": b(T)=" << c.values[0] << ", nodes above bound " << above
          << ", residual/limit max " << num(worst, 3) << " at t=" << num(c.t_grid[worst_k])
          << ", nodes over limit " << bad << "/" << c.n() << "; ";
    }
    r.pass = ok;
    r.measured = o.str() + "n=" + std::to_string(cx.z.n_boundary);
    return r;
}

// ---------------------------------------------------------------- 5
CheckResult c5_convergence(Context& cx) {
    CheckResult r{5, "boundary converges under mesh halving", false, "", 0, 0};
    const int* n = cx.z.n_conv;
    bool ok = true;
    std::ostringstream o;
    for (std::size_t ci = 0; ci < 2; ++ci) {
        const BoundaryCurve& a = cx.surface(n[0]).curves[ci];
        const BoundaryCurve& b = cx.surface(n[1]).curves[ci];
        const BoundaryCurve& c = cx.surface(n[2]).curves[ci];
        double d1 = 0, d2 = 0;
        for (std::size_t k = 0; k <= a.n(); ++k) d1 = std::max(d1, std::abs(a.values[k] - b.values[2 * k]));
        for (std::size_t k = 0; k <= b.n(); ++k) d2 = std::max(d2, std::abs(b.values[k] - c.values[2 * k]));
        ok = ok && d1 > d2;
        o << "h=" << a.h_ref << ": |b" << n[0] << "-b" << n[1] << "|=" << num(d1, 3) << " vs |b" << n[1]
          << "-b" << n[2] << "|=" << num(d2, 3) << "; ";
    }
    r.pass = ok;
    r.measured = o.str();
    return r;
}

std::vector<double> lattice_t(const Model& m) {
    std::vector<double> ts(10);
    for (int i = 0; i < 10; ++i) ts[i] = i == 9 ? m.p().horizon : m.p().horizon * i / 9.0;
    return ts;
}
std::vector<double> lattice_z() {
    std::vector<double> zs(20);
    for (int i = 0; i < 20; ++i) zs[i] = 0.05 * std::pow(1000.0, i / 19.0);
    return zs;
}

// ---------------------------------------------------------------- 6
CheckResult c6_envelope(Context& cx) {
    CheckResult r{6, "J_hat envelope, monotonicity and boundary values", false, "", 0, 0};
    const Model& m = cx.m;
    const BoundarySurface& surf = cx.surface(cx.z.n_boundary);
    const double I = m.p().invest_amount, rr = m.p().r, T = m.p().horizon;
    int neg = 0, over = 0, nonmono = 0, bnd = 0, term = 0, points = 0;
    double worst_b = 0;
    for (double h0 : {2.0, 1000.0})
        for (double t : lattice_t(m)) {
            const DualSlice sl(m, surf, t, health_pre(m, h0, t));
            double prev = 0;
            bool first = true;
            for (double z : lattice_z()) {
                ++points;
                const double jh = sl.j_hat(z);
                const double env = I * z / rr * -std::expm1(-rr * (T - t));
                const double scale = std::max(1.0, env);
                if (jh < -1e-8 * scale) ++neg;
                if (jh > env + 1e-8 * scale) ++over;
                if (!first && jh < prev - 1e-10 * scale) ++nonmono;
                if (t == T && jh != 0.0) ++term;
                prev = jh;
                first = false;
            }
            if (t < T) {
                const double jb = std::abs(sl.j_hat(sl.boundary()));
                worst_b = std::max(worst_b, jb);
                if (jb > 10 * 1e-12) ++bnd;
            }
        }
    r.pass = neg == 0 && over == 0 && nonmono == 0 && bnd == 0 && term == 0;
    r.measured = std::to_string(points) + " lattice points: below 0 " + std::to_string(neg) +
                 ", above envelope " + std::to_string(over) + ", z-decreasing steps " +
                 std::to_string(nonmono) + ", max |J_hat(b)| " + num(worst_b, 3) +
                 ", nonzero at T " + std::to_string(term);
    return r;
}

// ---------------------------------------------------------------- 7
CheckResult c7_convexity_duality(Context& cx) {
    CheckResult r{7, "convexity, z* round trip and V against a grid infimum", false, "", 0, 0};
    const Model& m = cx.m;
    const BoundarySurface& surf = cx.surface(cx.z.n_boundary);
    const double T = m.p().horizon;

    int concave = 0, cpoints = 0;
    double worst_c = 0;
    for (double h0 : {2.0, 1000.0})
        for (double t : lattice_t(m)) {
            if (t >= T) continue;
            const DualSlice sl(m, surf, t, health_pre(m, h0, t));
            for (double z : lattice_z()) {
                ++cpoints;
                const JValue v = sl.eval(z);
                const double scale = std::abs(sl.w_zz(z));
                const double rel = v.j_zz / scale;
                worst_c = std::min(worst_c, rel);
                if (v.j_zz < -1e-6 * scale) ++concave;
            }
        }

    double worst_rt = 0;
    int rt_points = 0;
    for (double h0 : {2.0, 1000.0})
        for (double t : {0.0, 5.0, 10.0, 15.0}) {
            const PrimalSlice ps(m, surf, t, health_pre(m, h0, t));
            std::vector<double> xs;
            for (double f : {0.05, 0.25, 0.5, 0.9}) xs.push_back(f * ps.kink_lo());
            for (double f : {1.1, 2.0}) xs.push_back(f * ps.b_hat());
            for (double x : xs) {
                const double zs = ps.z_star(x);
                const double jz = ps.dual().eval(zs).j_z;
                worst_rt = std::max(worst_rt, std::abs(jz + x) / (1 + x));
                ++rt_points;
            }
        }

    struct VP {
        double t, h0, frac;
        bool above;
    };
    const VP vps[5] = {{0, 1000, 0.5, false}, {0, 1000, 1.5, true}, {5, 1000, 0.3, false},
                       {10, 2, 0.5, false}, {15, 2, 0.7, false}};
    double worst_v = 0;
    const int G = cx.z.v_grid;
    for (const auto& q : vps) {
        const PrimalSlice ps(m, surf, q.t, health_pre(m, q.h0, q.t));
        const double x = q.above ? q.frac * ps.b_hat() : q.frac * ps.kink_lo();
        const double v = ps.policy(x).v;
        const double b = ps.dual().boundary();
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < G; ++i) {
            const double z = b * std::pow(10.0, -4.0 + 8.0 * i / (G - 1));
            best = std::min(best, ps.dual().eval(z).j + z * x);
        }
        worst_v = std::max(worst_v, std::abs(v - best) / std::abs(v));
    }
    r.pass = concave == 0 && worst_rt <= 1e-6 && worst_v <= 1e-4;
    r.measured = "min J_zz/|W_zz| " + num(worst_c, 3) + " (" + std::to_string(concave) + "/" +
                 std::to_string(cpoints) + " below -1e-6); max round-trip error/(1+x) " + num(worst_rt, 3) +
                 " over " + std::to_string(rt_points) + " points; max |V - grid inf|/|V| " + num(worst_v, 3) +
                 " (" + std::to_string(G) + "-point grid)";
    return r;
}

// ---------------------------------------------------------------- 8
CheckResult c8_stopping_optimality(Context& cx) {
    CheckResult r{8, "quadrature J_hat dominates perturbed stopping rules", false, "", 0, 120};
    const Model& m = cx.m;
    const BoundarySurface& surf = cx.surface(cx.z.n_boundary);
    struct P {
        double t, h0, q;
    };
    const P pts[5] = {{0, 1000, 1.5}, {0, 1000, 3.0}, {10, 1000, 2.0}, {0, 2, 2.0}, {10, 2, 1.5}};
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    std::uint64_t seed = cx.s.seed;
    for (const auto& q : pts) {
        const double h = health_pre(m, q.h0, q.t);
        const double b = boundary_value(m, surf, q.t, h);
        const DualPoint dp{q.t, q.q * b, h};
        const double jq = j_hat(m, surf, dp);
        for (double scale : {0.9, 1.1}) {
            const auto e = mc_j_hat(m, surf, dp, cx.z.stop_paths, cx.z.stop_steps, ++seed, scale, cx.s.threads);
            const double margin = (jq - (e.estimate - 2 * e.std_error)) / std::max(e.std_error, 1e-300);
            worst = std::min(worst, margin);
            ok = ok && jq >= e.estimate - 2 * e.std_error;
        }
    }
    r.pass = ok;
    r.measured = "min (J_hat - (MC - 2 SE))/SE = " + num(worst, 3) + " over 5 points x {0.9b, 1.1b}, " +
                 std::to_string(cx.z.stop_paths) + " paths";
    return r;
}

// ---------------------------------------------------------------- 9
CheckResult c9_identity(Context& cx) {
    CheckResult r{9, "wealth-dual identity along closed-loop paths", false, "", 0, 0};
    const Model& m = cx.m;
    const BoundarySurface& surf = cx.surface(cx.z.id_boundary);
    double e_coarse = 0, e_fine = 0, x_max = 0;
    for (double h0 : {2.0, 1000.0}) {
        const double b = boundary_value(m, surf, 0.0, h0);
        const double x0 = -j_z(m, surf, {0.0, 2.0 * b, h0});
        x_max = std::max(x_max, x0);
        SimConfig sc;
        sc.n_paths = cx.z.id_paths;
        sc.seed = cx.s.seed;
        sc.initial_wealth = x0;
        sc.initial_health = h0;
        sc.exact_policy = true;
        sc.track_identity = true;
        sc.keep_series = false;
        sc.threads = cx.s.threads;
        // coarse: N steps, each driven by the sum of two half-step increments
        sc.n_steps = cx.z.id_steps;
        sc.substeps = 2;
        const PathBundle a = simulate_closed_loop(m, surf, sc);
        // fine: 2N steps on the same Brownian path, compared at the coarse times
        sc.n_steps = 2 * cx.z.id_steps;
        sc.substeps = 1;
        sc.identity_every = 2;
        const PathBundle f = simulate_closed_loop(m, surf, sc);
        for (double e : a.identity_error) e_coarse = std::max(e_coarse, e);
        for (double e : f.identity_error) e_fine = std::max(e_fine, e);
    }
    const double floor = (std::sqrt(2.0) * e_fine - e_coarse) / (std::sqrt(2.0) - 1.0);
    const double tol = 1e-3 * (1 + x_max);
    r.pass = e_fine < e_coarse && floor <= tol;
    r.measured = "max |X + J_z|: " + num(e_coarse, 4) + " (N=" + std::to_string(cx.z.id_steps) + "), " +
                 num(e_fine, 4) + " (N=" + std::to_string(2 * cx.z.id_steps) +
                 "); extrapolated floor " + num(floor, 3) + " vs tolerance " + num(tol, 3) +
                 " (x0 up to " + num(x_max, 5) + ")";
    return r;
}

// ---------------------------------------------------------------- 10
CheckResult c10_qualitative(Context& cx) {
    CheckResult r{10, "qualitative behaviour of the boundary and policies", false, "", 0, 900};
    const Model& m = cx.m;
    AppConfig cfg;
    cfg.params = m.p();
    cfg.grid.n_steps = cx.z.n_boundary;
    cfg.grid.h = {2.0, 1000.0};
    std::ostringstream o;
    bool all = true;
    auto mark = [&](const std::string& tag, bool pass, const std::string& what) {
        all = all && pass;
        o << tag << (pass ? " pass" : " FAIL") << " [" << what << "]; ";
    };

    // (a), (b)
    const auto base = run_sweep(cfg, "alpha", {m.p().alpha}, cx.s.threads);
    if (!base[0].surface) throw std::runtime_error(base[0].error);
    bool a_ok = true, b_ok = true;
    std::string a_txt, b_txt;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& cv = base[0].surface->curves[c];
        const double bmax = *std::max_element(cv.values.begin(), cv.values.end());
        const int turns = sign_changes(cv.values, 1e-12 * bmax);
        const int viol = decreasing_in_t_violations(base[0].bhat[c]);
        a_ok = a_ok && turns > 0;
        b_ok = b_ok && viol == 0;
        a_txt += "h=" + num(cv.h_ref) + " turns " + std::to_string(turns) + " ";
        b_txt += "h=" + num(cv.h_ref) + " violations " + std::to_string(viol) + "/" +
                 std::to_string(cv.n() - 1) + " ";
    }
    mark("(a)", a_ok, a_txt + "of dual b in t");
    mark("(b)", b_ok, b_txt + "of b_hat decreasing in t");

    auto sweep_txt = [&](const std::vector<DirectionReport>& rs, bool& ok) {
        std::string s;
        for (const auto& d : rs) {
            ok = ok && d.pass;
            if (!std::isnan(d.h)) s += "h=" + num(d.h) + " ";
            s += direction_name(d.observed) + std::string(" (want ") + direction_name(d.expected) + ", mean b_hat";
            for (double v : d.metric) s += " " + num(v, 6);
            s += ") ";
        }
        return s;
    };
    {
        bool ok = true;
        std::string s = sweep_txt(sweep_directions(run_sweep(cfg, "h", {1000, 1200, 1500}, cx.s.threads), "h"), ok);
        s += sweep_txt(sweep_directions(run_sweep(cfg, "h", {2, 3, 4}, cx.s.threads), "h"), ok);
        mark("(c)", ok, s);
    }
    struct Sw {
        const char* tag;
        const char* param;
        std::vector<double> values;
    };
    const Sw sweeps[3] = {{"(d)", "delta", {0.0055, 0.011, 0.022}},
                          {"(e)", "alpha", {0.2, 0.2258, 0.25}},
                          {"(f)", "rho", {0.03, 0.05, 0.07}}};
    for (const auto& sw : sweeps) {
        bool ok = true;
        const std::string s = sweep_txt(sweep_directions(run_sweep(cfg, sw.param, sw.values, cx.s.threads), sw.param), ok);
        mark(sw.tag, ok, std::string(sw.param) + " " + s);
    }
    {
        const BoundarySurface& surf = cx.surface(cx.z.n_boundary, {2.0, 3.0, 4.0});
        const std::vector<double> ts{0.0, 5.0, 10.0, 15.0};
        double xm = 0;
        for (double t : ts) xm = std::max(xm, 2.0 * primal_boundary(m, surf, t, health_pre(m, 4.0, t)));
        std::vector<double> xs(40);
        for (int i = 0; i < 40; ++i) xs[i] = xm * (i + 1) / 40.0;
        const OrderingReport ordr = consumption_ordering(m, surf, {2.0, 3.0, 4.0}, ts, xs);
        mark("(g)", ordr.pass, "c* increasing in h at " + std::to_string(ordr.checked - ordr.violations) + "/" +
                                   std::to_string(ordr.checked) + " (t,x) pairs");
    }
    r.pass = all;
    r.measured = o.str();
    return r;
}

// ---------------------------------------------------------------- 11
CheckResult c11_determinism(Context& cx) {
    CheckResult r{11, "identical outputs for identical seeds", false, "", 0, 0};
    const fs::path root = cx.s.scratch_dir.empty()
                              ? fs::temp_directory_path() / ("hcinv_det_" + std::to_string(cx.s.seed))
                              : fs::path(cx.s.scratch_dir);
    AppConfig cfg;
    cfg.params = cx.m.p();
    cfg.grid.n_steps = 50;
    cfg.grid.t_points = 4;
    cfg.grid.z_points = 6;
    cfg.sim.n_paths = 200;
    cfg.sim.n_steps = 100;
    cfg.sim.seed = cx.s.seed;
    cfg.sim.initial_wealth = 400;
    cfg.sim.trajectories = true;
    auto run = [&](const std::string& tag, unsigned threads) {
        RunOptions opt;
        opt.out_dir = (root / tag).string();
        opt.threads = threads;
        cmd_simulate(cfg, opt);
        cmd_boundary(cfg, opt);
        cmd_value(cfg, opt);
        return opt.out_dir;
    };
    const std::string a = run("a", 1), b = run("b", 1), c = run("c", 2);
    const char* files[] = {"sim_summary.csv", "sim_paths.csv", "boundary_dual.csv", "boundary_primal.csv",
                           "value_surface.csv"};
    int differ = 0, out_of_tol = 0;
    double worst = 0;
    for (const char* f : files) {
        const auto pa = (fs::path(a) / f).string();
        if (csv_body(pa) != csv_body((fs::path(b) / f).string())) ++differ;
        const CsvTable ta = read_csv(pa), tc = read_csv((fs::path(c) / f).string());
        if (ta.rows.size() != tc.rows.size()) {
            ++out_of_tol;
            continue;
        }
        for (std::size_t i = 0; i < ta.rows.size(); ++i)
            for (std::size_t j = 0; j < ta.header.size(); ++j) {
                const double x = ta.num(i, j), y = tc.num(i, j);
                if (std::isnan(x) && std::isnan(y)) continue;
                const double d = std::abs(x - y) / std::max(1.0, std::abs(x));
                worst = std::max(worst, std::isnan(d) ? 1.0 : d);
            }
        if (worst > 1e-12) ++out_of_tol;
    }
    std::error_code ec;
    if (cx.s.scratch_dir.empty()) fs::remove_all(root, ec);
    r.pass = differ == 0 && out_of_tol == 0;
    r.measured = std::to_string(differ) + "/5 files differ between single-thread runs; max relative "
                 "difference with 2 threads " + num(worst, 3);
    return r;
}

}  // namespace

std::vector<CheckResult> run_acceptance(const ModelParams& params, const CheckSettings& s,
                                        const std::vector<int>& which) {
    Context cx(params, s);
    using Fn = CheckResult (*)(Context&);
    const Fn fns[11] = {c1_w_monte_carlo, c2_derivatives,         c3_pde_residual, c4_boundary_validity,
                        c5_convergence,   c6_envelope,            c7_convexity_duality,
                        c8_stopping_optimality, c9_identity,      c10_qualitative, c11_determinism};
    std::vector<CheckResult> out;
    for (int id = 1; id <= 11; ++id) {
        if (!which.empty() && std::find(which.begin(), which.end(), id) == which.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = fns[id - 1](cx);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.pass = false;
            r.measured = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.budget > 0 && s.full && r.seconds > r.budget) {
            r.pass = false;
            r.measured += "; over runtime budget";
        }
        if (s.log) *s.log << format_result(r) << std::endl;
        out.push_back(r);
    }
    return out;
}

std::string format_result(const CheckResult& r) {
    std::ostringstream o;
    o << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << r.name << ": " << r.measured
      << " (" << std::fixed << std::setprecision(1) << r.seconds << " s)";
    return o.str();
}

std::string results_json(const std::vector<CheckResult>& rs, const CheckSettings& s) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rs)
        j.push_back({{"id", r.id},
                     {"name", r.name},
                     {"pass", r.pass},
                     {"measured", r.measured},
                     {"seconds", r.seconds}});
    return nlohmann::json{{"settings", s.full ? "full" : "coarse"}, {"seed", s.seed}, {"criteria", j}}.dump(2);
}

}  // namespace hcinv::app
