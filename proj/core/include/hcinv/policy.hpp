/**
 * @file policy.hpp
 * @brief Dual-to-primal transform: z*(t,x,h), value V, primal boundary b_hat,
 *        feedback consumption and risky allocation, and the post-investment
 *        value V_hat.
 */
#pragma once

#include "hcinv/value.hpp"

namespace hcinv {

struct PrimalPoint {
    double t;
    double x;
    double h;
};

struct PolicyEval {
    double z_star = 0;
    double v = 0;
    double c_star = 0;
    double pi_star = 0;
    bool invest_now = false;
    /// Wealth fell in the interval (-J_z(b+), b_hat) where the discrete J has
    /// a kink at z = b; z* is then b itself.
    bool at_kink = false;
};

/// u(c, h) = c^alpha h^{1-alpha}
double utility(const Model& m, double c, double h);

/// Consumption that maximizes u(c,h) - z c: h (z/alpha)^{1/(alpha-1)}.
double inverse_marginal_utility(const Model& m, double z, double h);

/// Primal quantities at fixed (t, h), t < T.
class PrimalSlice {
public:
    PrimalSlice(const Model& m, const BoundarySurface& surf, double t, double h);

    const DualSlice& dual() const { return dual_; }
    /// -W_z(t, b, h) + g
    double b_hat() const { return b_hat_; }
    /// Lower end of the kink interval, -J_z(t, b+, h).
    double kink_lo() const { return kink_lo_; }

    /// Solves J_z(t, z, h) = -x. `guess` seeds the Newton iteration (<= 0: none).
    double z_star(double x, double guess = 0.0, bool* at_kink = nullptr) const;
    PolicyEval policy(double x, double guess = 0.0) const;

private:
    const Model* m_;
    DualSlice dual_;
    double b_hat_ = 0, kink_lo_ = 0;
};

double z_star(const Model& m, const BoundarySurface& surf, const PrimalPoint& p);
double primal_boundary(const Model& m, const BoundarySurface& surf, double t, double h);
PolicyEval policy(const Model& m, const BoundarySurface& surf, const PrimalPoint& p);

struct PostInvestment {
    double v = 0;
    double z_hat = 0;
};

/// inf over z of W(t,z,h) + z (x - g), by golden-section search in log z.
/// Throws std::domain_error when x <= g (the remaining payments are unaffordable).
PostInvestment post_investment_value(const Model& m, const PrimalPoint& p);

/// Closed-form minimizer of W + z (x - g) given the time factor K0.
double post_investment_dual(const Model& m, double x_minus_g, double k0);

}  // namespace hcinv
