#include "hcinv/boundary.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hcinv/dual.hpp"
#include "hcinv/health.hpp"
#include "hcinv/parallel.hpp"

namespace hcinv {

KernelTerms kernel_terms(const Model& m, double s, double h) {
    const auto& p = m.p();
    const auto& d = m.d();
    const double th2 = d.theta * d.theta;
    const double im = integrated_mortality_pre(m, h, s);
    KernelTerms k;
    k.s = s;
    k.disc = std::exp(-p.rho * s - im);
    k.n2 = std::exp((p.rho - p.r) * s + im);
    k.n1 = std::exp(d.a * ((p.rho - p.r - 0.5 * th2) * s + im) + 0.5 * d.a * d.a * th2 * s);
    k.c1 = (p.rho - p.r + 0.5 * th2) * s + im;
    k.c2 = (p.rho - p.r + d.a * th2 - 0.5 * th2) * s + im;
    k.vol = d.theta * std::sqrt(s);
    return k;
}

KernelEval kernel_eval(const Model& m, const KernelTerms& k, double gamma, double z, double y) {
    const double I = m.p().invest_amount;
    const double a = m.d().a;
    const double K1 = k.disc * k.n2 * I;
    const double K2 = k.disc * m.d().f_of_I * gamma * k.n1;
    const double za = std::pow(z, a);
    KernelEval out;

    // Phi values and, when the boundary sits at finite distance, densities
    double p1, p2;
    bool smooth = false;
    double d1 = 0, d2 = 0;
    if (y <= 0) {
        p1 = p2 = 1.0;
    } else if (k.vol <= 0) {
        // deterministic dual path: an indicator on the shifted log-distance
        const double lz = std::log(z / y);
        auto step = [](double v) { return v == 0 ? 0.5 : (v > 0 ? 1.0 : 0.0); };
        p1 = step(lz + k.c1);
        p2 = step(lz + k.c2);
    } else {
        const double lz = std::log(z / y);
        d1 = (lz + k.c1) / k.vol;
        d2 = (lz + k.c2) / k.vol;
        p1 = normal_cdf(d1);
        p2 = normal_cdf(d2);
        smooth = true;
    }
    out.g = K1 * z * p1 - K2 * za * p2;
    out.g_z = K1 * p1 - K2 * a * za / z * p2;
    out.g_zz = -K2 * a * (a - 1.0) * za / (z * z) * p2;
    if (smooth) {
        const double f1 = normal_pdf(d1), f2 = normal_pdf(d2);
        out.g_z += K1 * f1 / k.vol - K2 * za / z * f2 / k.vol;
        out.g_zz += K1 * f1 / (z * k.vol) * (1.0 - d1 / k.vol) -
                    K2 * za / (z * z) * ((2.0 * a - 1.0) * f2 / k.vol - d2 * f2 / (k.vol * k.vol));
    }
    return out;
}

KernelEval kernel_endpoint(const Model& m, double gamma, double z, double b, double vol) {
    const double I = m.p().invest_amount;
    const double a = m.d().a;
    const double K2 = m.d().f_of_I * gamma;
    const double za = std::pow(z, a);
    // P(q) = 2 int_0^1 (1 - u) Phi(q / sqrt(u)) du and its q-derivatives.
    // F0 = int Phi(q/sqrt u) and F1 = int u Phi(q/sqrt u) in closed form; the
    // upper tail of F0 is written via Phi(-|q|) for accuracy.
    double P, Pz = 0, Pzz = 0;
    if (vol <= 0) {
        P = z == b ? 0.5 : (z > b ? 1.0 : 0.0);
    } else {
        const double q = std::log(z / b) / vol, aq = std::abs(q);
        const double phi = normal_pdf(aq), tail_n = normal_cdf(-aq);
        const double tail = (1.0 + q * q) * tail_n - aq * phi;
        const double iq = 2.0 / 3.0 * (phi * (1.0 - q * q) + aq * aq * aq * tail_n);  // int sqrt(u) phi(q/sqrt u)
        // 2 F0 - Phi(q) - q I / 2, with F0 = 1 - tail and Phi(q) = 1 - Phi(-q) above b
        P = q >= 0 ? 1.0 - 2.0 * tail + tail_n - 0.5 * q * iq : 2.0 * tail - tail_n - 0.5 * q * iq;
        const double f0p = 2.0 * (phi - aq * tail_n);
        const double f0pp = (q >= 0 ? -2.0 : 2.0) * tail_n;
        const double f1pp = -2.0 * q * (phi - aq * tail_n);
        const double P1 = 2.0 * (f0p - iq);
        const double P2 = 2.0 * (f0pp - f1pp);
        Pz = P1 / (z * vol);
        Pzz = P2 / (z * z * vol * vol) - P1 / (z * z * vol);
    }
    KernelEval out;
    out.g = I * z * P - K2 * za * P;
    out.g_z = I * (P + z * Pz) - K2 * (a * za / z * P + za * Pz);
    out.g_zz = I * (2.0 * Pz + z * Pzz) -
               K2 * (a * (a - 1.0) * za / (z * z) * P + 2.0 * a * za / z * Pz + za * Pzz);
    return out;
}

double kernel_G(const Model& m, double xi, double s, double b_xi, double y, double h) {
    if (!(b_xi > 0)) throw std::domain_error("kernel_G: b_xi must be positive");
    if (!(s >= 0 && xi >= s)) throw std::domain_error("kernel_G: need 0 <= s <= xi");
    const double t = m.p().horizon - xi;
    const double gam = gamma_fn(m, std::min(t + s, m.p().horizon), health_pre(m, h, s));
    return kernel_eval(m, kernel_terms(m, s, h), gam, b_xi, y).g;
}

StageFunction::StageFunction(const Model& m, double h_start, const std::vector<double>& s,
                             const std::vector<double>& weights, const std::vector<double>& y,
                             const std::vector<double>& gamma)
    : m_(&m), w_(weights), y_(y), gamma_(gamma) {
    if (s.empty() || s[0] != 0.0 || s.size() != weights.size() || s.size() != y.size() ||
        s.size() != gamma.size())
        throw std::invalid_argument("StageFunction: mismatched mesh");
    terms_.reserve(s.size());
    for (double si : s) terms_.push_back(kernel_terms(m, si, h_start));
}

KernelEval StageFunction::eval(double z) const {
    KernelEval acc;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const KernelEval e = i == 0 && anchor_ > 0 && terms_.size() > 1
                                 ? kernel_endpoint(*m_, gamma_[0], z, anchor_, terms_[1].vol)
                                 : kernel_eval(*m_, terms_[i], gamma_[i], z, i == 0 ? z : y_[i]);
        acc.g += w_[i] * e.g;
        acc.g_z += w_[i] * e.g_z;
        acc.g_zz += w_[i] * e.g_zz;
    }
    return acc;
}

double StageFunction::solve(double hi, double tol) const {
    const double lo = 1e-12;
    auto f = [this](double z) { return (*this)(z); };
    const double flo = f(lo);
    double fhi = f(hi);
    if ((flo > 0) == (fhi > 0) && fhi != 0.0) {
        hi *= 2.0;
        fhi = f(hi);
        if ((flo > 0) == (fhi > 0) && fhi != 0.0)
            throw BracketError("stage function has no sign change", lo, hi, flo, fhi);
    }
    return find_root(f, BracketSpec{lo, hi, tol, 400});
}

std::optional<std::size_t> BoundaryCurve::node_at_t(double t) const {
    const double T = t_grid.front();
    const double xi = T - t;
    const double pos = xi / dxi();
    const double k = std::round(pos);
    if (k < 0 || k > static_cast<double>(n())) return std::nullopt;
    if (std::abs(pos - k) <= 1e-9 * std::max(1.0, k)) return static_cast<std::size_t>(k);
    return std::nullopt;
}

void BoundaryCurve::build_interpolants() {
    b_interp = MonotoneInterp(xi_grid, values);
    gamma_interp = MonotoneInterp(xi_grid, gamma);
}

double BoundaryCurve::b_at_xi(double xi) const {
    if (xi <= 0) return 0.0;
    return b_interp(xi);
}

double BoundaryCurve::gamma_at_xi(double xi) const {
    if (xi <= 0) return 0.0;
    return gamma_interp(xi);
}

namespace {

std::vector<double> trapezoid_weights(std::size_t nodes, double h) {
    std::vector<double> w(nodes, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

}  // namespace

BoundaryCurve solve_curve(const Model& m, double h, int n_steps, const SolveOptions& opt) {
    if (n_steps < 2) throw std::invalid_argument("solve_curve: n_steps >= 2 required");
    if (!(h > 0)) throw std::invalid_argument("solve_curve: h must be positive");
    const double T = m.p().horizon;
    const std::size_t n = static_cast<std::size_t>(n_steps);
    const double dx = T / n_steps;

    BoundaryCurve c;
    c.h_ref = h;
    c.bisect_tol = opt.bisect_tol;
    c.xi_grid.resize(n + 1);
    c.t_grid.resize(n + 1);
    c.health.resize(n + 1);
    c.values.assign(n + 1, 0.0);
    c.gamma.assign(n + 1, 0.0);
    c.upper.assign(n + 1, 0.0);
    c.residuals.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
    c.residuals[0] = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        c.xi_grid[j] = j == n ? T : dx * static_cast<double>(j);
        c.t_grid[j] = T - c.xi_grid[j];
        c.health[j] = health_pre(m, h, c.t_grid[j]);
        if (j > 0) {
            c.gamma[j] = gamma_fn(m, c.t_grid[j], c.health[j]);
            c.upper[j] = upper_bound_from_gamma(m, c.gamma[j]);
        }
    }

    for (std::size_t k = 1; k <= n; ++k) {
        // s_i = xi_i pairs with the later node k - i
        std::vector<double> s(k + 1), y(k + 1), gam(k + 1);
        for (std::size_t i = 0; i <= k; ++i) {
            s[i] = c.xi_grid[i];
            y[i] = c.values[k - i];
            gam[i] = c.gamma[k - i];
        }
        const StageFunction F(m, c.health[k], s, trapezoid_weights(k + 1, dx), y, gam);
        try {
            c.values[k] = F.solve(c.upper[k], opt.bisect_tol);
        } catch (const BracketError& e) {
            std::ostringstream os;
            os << "solve_curve: bracket failure at stage k=" << k << " (h=" << h << ", bracket ["
               << e.lo << ", " << e.hi << "], F = " << e.f_lo << ", " << e.f_hi << ")";
            throw BracketError(os.str(), e.lo, e.hi, e.f_lo, e.f_hi);
        }
    }
    c.build_interpolants();
    return c;
}

BoundarySurface solve_surface(const Model& m, const std::vector<double>& h_grid, int n_steps,
                              unsigned threads, const SolveOptions& opt) {
    if (h_grid.empty()) throw std::invalid_argument("solve_surface: empty h grid");
    for (std::size_t i = 0; i < h_grid.size(); ++i) {
        if (!(h_grid[i] > 0)) throw std::invalid_argument("solve_surface: h must be positive");
        if (i > 0 && !(h_grid[i] > h_grid[i - 1]))
            throw std::invalid_argument("solve_surface: h grid must be strictly increasing");
    }
    const auto t0 = std::chrono::steady_clock::now();
    BoundarySurface surf;
    surf.h_grid = h_grid;
    surf.curves.resize(h_grid.size());
    parallel_for(h_grid.size(), threads, [&](std::size_t i) {
        try {
            surf.curves[i] = solve_curve(m, h_grid[i], n_steps, opt);
        } catch (const BracketError& e) {
            std::ostringstream os;
            os << "[h=" << h_grid[i] << "] " << e.what();
            throw BracketError(os.str(), e.lo, e.hi, e.f_lo, e.f_hi);
        }
    });
    surf.meta.n_steps = n_steps;
    surf.meta.bisect_tol = opt.bisect_tol;
    surf.meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return surf;
}

namespace {

struct FineGamma {
    double dx = 0;
    std::vector<double> gamma;  // at xi = i dx, i = 0..R n
};

FineGamma fine_gamma(const Model& m, const BoundaryCurve& c, int refine, std::size_t kmax) {
    FineGamma fg;
    fg.dx = c.dxi() / refine;
    const std::size_t N = kmax * static_cast<std::size_t>(refine);
    fg.gamma.assign(N + 1, 0.0);
    const double T = m.p().horizon;
    for (std::size_t i = 1; i <= N; ++i) {
        const double t = std::max(0.0, T - fg.dx * static_cast<double>(i));
        fg.gamma[i] = gamma_fn(m, t, health_pre(m, c.h_ref, t));
    }
    return fg;
}

double residual_with(const Model& m, const BoundaryCurve& c, std::size_t k, int refine,
                     const FineGamma& fg) {
    const std::size_t K = k * static_cast<std::size_t>(refine);
    std::vector<double> s(K + 1), y(K + 1), gam(K + 1);
    for (std::size_t i = 0; i <= K; ++i) {
        s[i] = fg.dx * static_cast<double>(i);
        const std::size_t back = K - i;  // fine index of xi_k - s_i
        y[i] = back == 0 ? 0.0
                         : (back % refine == 0 ? c.values[back / refine]
                                               : c.b_at_xi(fg.dx * static_cast<double>(back)));
        gam[i] = fg.gamma[back];
    }
    const StageFunction F(m, c.health[k], s, trapezoid_weights(K + 1, fg.dx), y, gam);
    return F(c.values[k]);
}

}  // namespace

double residual(const Model& m, const BoundaryCurve& curve, std::size_t k, int refine) {
    if (k < 1 || k > curve.n()) throw std::out_of_range("residual: node index outside [1, n]");
    if (refine < 1) throw std::invalid_argument("residual: refine >= 1 required");
    if (refine == 1) {
        FineGamma fg{curve.dxi(), curve.gamma};
        return residual_with(m, curve, k, 1, fg);
    }
    return residual_with(m, curve, k, refine, fine_gamma(m, curve, refine, k));
}

std::vector<double> all_residuals(const Model& m, const BoundaryCurve& curve, int refine) {
    if (refine < 1) throw std::invalid_argument("residual: refine >= 1 required");
    const FineGamma fg = refine == 1 ? FineGamma{curve.dxi(), curve.gamma}
                                     : fine_gamma(m, curve, refine, curve.n());
    std::vector<double> out(curve.n() + 1, 0.0);
    for (std::size_t k = 1; k <= curve.n(); ++k) out[k] = residual_with(m, curve, k, refine, fg);
    return out;
}

void fill_residuals(const Model& m, BoundaryCurve& curve, int refine) {
    curve.residuals = all_residuals(m, curve, refine);
}

CharacteristicView::CharacteristicView(const Model& m, const BoundarySurface& surf, double t, double h) {
    if (surf.curves.empty()) throw std::invalid_argument("boundary surface is empty");
    h_ref_ = health_pre(m, h, -t);
    const auto& hs = surf.h_grid;
    const double slack = 1e-9;
    for (std::size_t i = 0; i < hs.size(); ++i)
        if (std::abs(h_ref_ - hs[i]) <= slack * hs[i]) {
            exact_ = lo_ = hi_ = &surf.curves[i];
            return;
        }
    if (h_ref_ < hs.front() || h_ref_ > hs.back()) {
        std::ostringstream os;
        os << "point (t=" << t << ", h=" << h << ") lies on health characteristic h0=" << h_ref_
           << " outside the solved range [" << hs.front() << ", " << hs.back() << "]";
        throw std::out_of_range(os.str());
    }
    const std::size_t i = bracket_index(hs, h_ref_);
    lo_ = &surf.curves[i];
    hi_ = &surf.curves[i + 1];
    w_ = std::log(h_ref_ / hs[i]) / std::log(hs[i + 1] / hs[i]);
}

double CharacteristicView::b_at_xi(double xi) const {
    if (exact_) return exact_->b_at_xi(xi);
    return (1 - w_) * lo_->b_at_xi(xi) + w_ * hi_->b_at_xi(xi);
}

double CharacteristicView::gamma_at_xi(double xi) const {
    if (exact_) return exact_->gamma_at_xi(xi);
    return (1 - w_) * lo_->gamma_at_xi(xi) + w_ * hi_->gamma_at_xi(xi);
}

double boundary_value(const Model& m, const BoundarySurface& surf, double t, double h) {
    const CharacteristicView v(m, surf, t, h);
    return v.b_at_xi(m.p().horizon - t);
}

}  // namespace hcinv
