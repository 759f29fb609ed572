#include "hcinv/policy.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace hcinv {

double utility(const Model& m, double c, double h) {
    if (c <= 0) return 0.0;
    const double a = m.p().alpha;
    return std::pow(c, a) * std::pow(h, 1.0 - a);
}

double inverse_marginal_utility(const Model& m, double z, double h) {
    const double a = m.p().alpha;
    return h * std::pow(z / a, 1.0 / (a - 1.0));
}

double post_investment_dual(const Model& m, double x_minus_g, double k0) {
    const double a = m.p().alpha;
    return std::pow(x_minus_g / (std::pow(a, 1.0 / (1.0 - a)) * k0), a - 1.0);
}

PrimalSlice::PrimalSlice(const Model& m, const BoundarySurface& surf, double t, double h)
    : m_(&m), dual_(m, surf, t, h) {
    if (!(t < m.p().horizon)) throw std::domain_error("PrimalSlice: requires t < T");
    const double b = dual_.boundary();
    b_hat_ = -dual_.w_hat_z(b);
    kink_lo_ = -dual_.eval_continuation(b).j_z;
}

double PrimalSlice::z_star(double x, double guess, bool* at_kink) const {
    if (!(x > 0)) throw std::domain_error("z_star: wealth must be positive");
    if (at_kink) *at_kink = false;
    const double b = dual_.boundary();
    if (x >= b_hat_) return post_investment_dual(*m_, x - dual_.g(), dual_.k0());
    if (x >= kink_lo_) {
        if (at_kink) *at_kink = true;
        return b;
    }
    auto phi = [&](double z) { return dual_.eval_continuation(z).j_z + x; };
    double lo = b;
    double hi = guess > b ? guess : 2.0 * b;
    int expand = 0;
    while (phi(hi) < 0) {
        lo = hi;
        hi *= 2.0;
        if (++expand > 200) {
            throw BracketError("z_star: no bracket for J_z = -x", b, hi, phi(b), phi(hi));
        }
    }
    double z0 = guess > lo && guess < hi ? guess : 0.5 * (lo + hi);
    std::uintmax_t iters = 100;
    auto fn = [&](double z) {
        const JValue v = dual_.eval_continuation(z);
        return std::make_pair(v.j_z + x, v.j_zz);
    };
    const double z = boost::math::tools::newton_raphson_iterate(fn, z0, lo, hi, 50, iters);
    if (std::abs(phi(z)) <= 1e-10 * (1.0 + x)) return z;
    // Newton can stall where the discrete J_z is not monotone (the first
    // stages below T); fall back to bisection on the bracket
    return find_root(phi, {lo, hi, 1e-15 * hi, 400});
}

PolicyEval PrimalSlice::policy(double x, double guess) const {
    PolicyEval out;
    out.z_star = z_star(x, guess, &out.at_kink);
    out.invest_now = x >= b_hat_;
    const JValue v = out.at_kink ? dual_.eval_continuation(out.z_star) : dual_.eval(out.z_star);
    out.v = v.j + x * out.z_star;
    out.c_star = inverse_marginal_utility(*m_, out.z_star, dual_.h());
    out.pi_star = m_->d().theta / m_->p().sigma * out.z_star * v.j_zz;
    return out;
}

double z_star(const Model& m, const BoundarySurface& surf, const PrimalPoint& p) {
    return PrimalSlice(m, surf, p.t, p.h).z_star(p.x);
}

double primal_boundary(const Model& m, const BoundarySurface& surf, double t, double h) {
    return PrimalSlice(m, surf, t, h).b_hat();
}

PolicyEval policy(const Model& m, const BoundarySurface& surf, const PrimalPoint& p) {
    return PrimalSlice(m, surf, p.t, p.h).policy(p.x);
}

PostInvestment post_investment_value(const Model& m, const PrimalPoint& p) {
    if (!(p.t >= 0 && p.t <= m.p().horizon)) throw std::domain_error("post_investment_value: t outside [0, T]");
    if (!(p.h > 0)) throw std::domain_error("post_investment_value: h must be positive");
    const double g = m.g_value(p.t);
    if (!(p.x > g))
        throw std::domain_error("post_investment_value: wealth does not cover the remaining health payments");
    const double k0 = w_time_factor(m, p.t, p.h);
    if (k0 <= 0) return {0.0, 0.0};
    const auto& d = m.d();
    auto f = [&](double u) { return d.C * std::exp(d.a * u) * k0 + std::exp(u) * (p.x - g); };
    const ScalarMin r = minimize_scalar(f, -60.0, 60.0, 1e-10);
    return {r.min, std::exp(r.argmin)};
}

}  // namespace hcinv
