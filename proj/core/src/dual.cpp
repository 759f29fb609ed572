#include "hcinv/dual.hpp"

#include <cmath>
#include <stdexcept>

#include "hcinv/health.hpp"
#include "hcinv/numerics.hpp"

namespace hcinv {

void check_point(const Model& m, const DualPoint& p) {
    if (!(p.t >= 0 && p.t <= m.p().horizon)) throw std::domain_error("dual point: t outside [0, T]");
    if (!(p.z > 0)) throw std::domain_error("dual point: z must be positive");
    if (!(p.h > 0)) throw std::domain_error("dual point: h must be positive");
}

namespace {

/// Integrands of the three inner integrals at health H2(u).
struct Inner {
    double m2, k, k2;
};

struct ProfileKernel {
    const Model& m;
    double h;

    Inner inner(double u) const {
        const auto& p = m.p();
        const double hh = health_post(m, h, u);
        const double hk = std::pow(hh, -p.kappa);
        const double e = std::exp(-p.delta * u);
        return {p.m0 + p.m1 * hk, hk / hh * e, -(p.kappa + 1.0) * hk / (hh * hh) * e * e};
    }

    /// GL integral of the inner integrands over [lo, hi].
    Inner inner_sum(double lo, double hi) const {
        const auto& g = gauss12();
        const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
        Inner acc{0, 0, 0};
        for (int i = 0; i < 12; ++i) {
            const Inner v = inner(c + r * g.x[i]);
            acc.m2 += g.w[i] * v.m2;
            acc.k += g.w[i] * v.k;
            acc.k2 += g.w[i] * v.k2;
        }
        return {acc.m2 * r, acc.k * r, acc.k2 * r};
    }

    double log_ae(double s, double im2) const {
        return m.d().lam_a * s + (m.p().rho * s + im2) / (m.p().alpha - 1.0);
    }
};

std::vector<double> panel_edges(double lo, double hi, double panel) {
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel - 1e-12)));
    std::vector<double> e(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = lo + (hi - lo) * i / n;
    e[n] = hi;
    return e;
}

}  // namespace

ProfileSums post_profile(const Model& m, double h, double tau, double panel) {
    ProfileSums out;
    if (tau <= 0) {
        // empty integral; the end integrands are the one-sided limits
        out.end_k0 = h;
        out.end_gamma = m.d().C;
        return out;
    }
    const ProfileKernel pk{m, h};
    const auto& g = gauss12();
    const auto& d = m.d();
    const double delta = m.p().delta;
    const auto edges = panel_edges(0.0, tau, panel);

    Inner cum{0, 0, 0};
    double k0 = 0, gam = 0, gam_h = 0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], hi = edges[p + 1];
        const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
        for (int i = 0; i < 12; ++i) {
            const double s = c + r * g.x[i];
            const Inner part = pk.inner_sum(lo, s);
            const double im2 = cum.m2 + part.m2, K = cum.k + part.k, K2 = cum.k2 + part.k2;
            const double ae = std::exp(pk.log_ae(s, im2));
            const double h2 = health_post(m, h, s);
            const double e = std::exp(-delta * s);
            const double bk = d.beta_p * K;
            k0 += r * g.w[i] * ae * h2;
            gam += r * g.w[i] * ae * (bk * h2 + e);
            gam_h += r * g.w[i] * ae * (bk * (bk * h2 + e) + d.beta_p * (K2 * h2 + K * e));
        }
        const Inner full = pk.inner_sum(lo, hi);
        cum.m2 += full.m2;
        cum.k += full.k;
        cum.k2 += full.k2;
    }
    out.k0 = k0;
    out.gamma = d.C * gam;
    out.gamma_h = d.C * gam_h;
    const double ae = std::exp(pk.log_ae(tau, cum.m2));
    const double h2 = health_post(m, h, tau);
    out.end_k0 = ae * h2;
    out.end_gamma = d.C * ae * (d.beta_p * cum.k * h2 + std::exp(-delta * tau));
    return out;
}

PostProfile::PostProfile(const Model& m, double h, const std::vector<double>& edges, double panel)
    : edges_(edges) {
    if (edges_.size() < 2 || edges_.front() != 0.0)
        throw std::invalid_argument("PostProfile: edges must start at 0 and have two entries");
    const ProfileKernel pk{m, h};
    const auto& g = gauss12();
    const std::size_t n = edges_.size();
    health_.resize(n);
    im2_.assign(n, 0.0);
    k0_cum_.assign(n, 0.0);
    log_ae_.assign(n, 0.0);
    health_[0] = h;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(edges_[i + 1] > edges_[i])) throw std::invalid_argument("PostProfile: edges must increase");
        double im = im2_[i], k0 = k0_cum_[i];
        const auto sub = panel_edges(edges_[i], edges_[i + 1], panel);
        for (std::size_t p = 0; p + 1 < sub.size(); ++p) {
            const double lo = sub[p], hi = sub[p + 1];
            const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
            for (int q = 0; q < 12; ++q) {
                const double s = c + r * g.x[q];
                const double ims = im + pk.inner_sum(lo, s).m2;
                k0 += r * g.w[q] * std::exp(pk.log_ae(s, ims)) * health_post(m, h, s);
            }
            im += pk.inner_sum(lo, hi).m2;
        }
        im2_[i + 1] = im;
        k0_cum_[i + 1] = k0;
        log_ae_[i + 1] = pk.log_ae(edges_[i + 1], im);
        health_[i + 1] = health_post(m, h, edges_[i + 1]);
    }
}

double PostProfile::tail_k0(std::size_t i) const {
    return (k0_cum_.back() - k0_cum_[i]) * std::exp(-log_ae_[i]);
}

double u_hat(const Model& m, double z, double h) {
    const double a = m.d().a;
    return (1.0 - m.p().alpha) * std::pow(z / m.p().alpha, a) * h;
}

double w_time_factor(const Model& m, double t, double h) {
    return post_profile(m, h, m.p().horizon - t).k0;
}

double W_value(const Model& m, const DualPoint& p) {
    check_point(m, p);
    return m.d().C * std::pow(p.z, m.d().a) * w_time_factor(m, p.t, p.h);
}

WDerivBundle W_partials(const Model& m, const DualPoint& p) {
    check_point(m, p);
    const auto& d = m.d();
    const double tau = m.p().horizon - p.t;
    const ProfileSums ps = post_profile(m, p.h, tau);
    const double za = std::pow(p.z, d.a);
    WDerivBundle b;
    b.w = d.C * za * ps.k0;
    b.w_z = d.a * d.C * za / p.z * ps.k0;
    b.w_zz = d.a * (d.a - 1.0) * d.C * za / (p.z * p.z) * ps.k0;
    b.w_t = -d.C * za * ps.end_k0;
    b.w_h = za * ps.gamma;
    b.w_hz = d.a * za / p.z * ps.gamma;
    b.w_hh = za * ps.gamma_h;
    b.w_ht = -za * ps.end_gamma;
    return b;
}

double gamma_fn(const Model& m, double t, double h) {
    if (!(t >= 0 && t <= m.p().horizon)) throw std::domain_error("gamma_fn: t outside [0, T]");
    if (!(h > 0)) throw std::domain_error("gamma_fn: h must be positive");
    return post_profile(m, h, m.p().horizon - t).gamma;
}

double upper_bound_from_gamma(const Model& m, double gamma) {
    if (gamma <= 0) return 0.0;
    const auto& p = m.p();
    return std::pow(p.invest_amount / m.d().f_of_I, p.alpha - 1.0) * std::pow(gamma, 1.0 - p.alpha);
}

double boundary_upper_bound(const Model& m, double t, double h) {
    return upper_bound_from_gamma(m, gamma_fn(m, t, h));
}

}  // namespace hcinv
