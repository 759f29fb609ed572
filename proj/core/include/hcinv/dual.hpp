/**
 * @file dual.hpp
 * @brief Closed-form dual objects after investment: the dual utility, the
 *        post-investment value W, the factor Gamma with W_h = z^a Gamma,
 *        and the upper bound g on the free boundary.
 *
 * W(t,z,h) = C z^a K0(T-t, h) where
 *   K0(tau, h) = int_0^tau A(s) E(s) H2(s) ds,
 *   A(s) = e^{lam_a s},  E(s) = exp((rho s + int_0^s M(H2)) / (alpha - 1)),
 * and H2 is the post-investment health path started at h.
 */
#pragma once

#include <vector>

#include "hcinv/params.hpp"

namespace hcinv {

struct DualPoint {
    double t;
    double z;
    double h;
};

/// Throws std::domain_error unless 0 <= t <= T, z > 0, h > 0.
void check_point(const Model& m, const DualPoint& p);

struct WDerivBundle {
    double w = 0, w_z = 0, w_h = 0, w_t = 0;
    double w_hh = 0, w_hz = 0, w_ht = 0;
    double w_zz = 0;
};

/// Integrals of the post-investment profile over [0, tau] started at health h.
struct ProfileSums {
    double k0 = 0;      // int A E H2
    double gamma = 0;   // C int A E (beta' K H2 + e^{-delta s})
    double gamma_h = 0; // d gamma / d h
    double end_k0 = 0;  // integrand of k0 at s = tau
    double end_gamma = 0;  // integrand of gamma at s = tau
};

/// Composite 12-point Gauss-Legendre evaluation with exact cumulative inner
/// integrals; panel width at most `panel`.
ProfileSums post_profile(const Model& m, double h, double tau, double panel = 0.25);

/// Cumulative profile tabulated at caller-chosen edges 0 = e_0 < ... < e_n.
/// Supports tail integrals from any edge, which is what a wealth path that
/// invested at e_0 needs for the closed-form post-investment policy.
class PostProfile {
public:
    PostProfile(const Model& m, double h, const std::vector<double>& edges, double panel = 0.25);

    const std::vector<double>& edges() const { return edges_; }
    double health(std::size_t i) const { return health_[i]; }
    /// int_0^{e_i} M(H2)
    double im2(std::size_t i) const { return im2_[i]; }
    /// K0 seen from edge i: int_{e_i}^{e_n} A E H2 / (A E)(e_i).
    double tail_k0(std::size_t i) const;

private:
    std::vector<double> edges_, health_, im2_, k0_cum_, log_ae_;
};

/// (1 - alpha) (z/alpha)^{alpha/(alpha-1)} h
double u_hat(const Model& m, double z, double h);

/// K0(T - t, h)
double w_time_factor(const Model& m, double t, double h);

double W_value(const Model& m, const DualPoint& p);

/// All partials; requires t < T for the derivative entries (at t = T every
/// entry is zero except w_t, which is returned as the one-sided limit).
WDerivBundle W_partials(const Model& m, const DualPoint& p);

/// Gamma(t, h) with W_h = z^a Gamma; zero at t = T.
double gamma_fn(const Model& m, double t, double h);

/// (I / f(I))^{alpha-1} Gamma^{1-alpha}; returns 0 at t = T.
double boundary_upper_bound(const Model& m, double t, double h);

/// Same bound from a precomputed Gamma.
double upper_bound_from_gamma(const Model& m, double gamma);

}  // namespace hcinv
