/**
 * @file health.hpp
 * @brief Deterministic health paths and the mortality intensity.
 *
 * Before investment health decays exponentially; after investment the
 * lump sum adds a constant production flow f(I) to the health drift.
 */
#pragma once

#include "hcinv/params.hpp"

namespace hcinv {

enum class HealthPhase { PreInvestment, PostInvestment };

/// h0 e^{-delta s}
double health_pre(const Model& m, double h0, double s);

/// h e^{-delta s} + (f(I)/delta)(1 - e^{-delta s})
double health_post(const Model& m, double h_at_invest, double s);

/// m0 + m1 h^{-kappa}; throws std::domain_error for h <= 0.
double mortality(const Model& m, double h);

/// Exact integral of the mortality rate along health_pre over [0, s].
double integrated_mortality_pre(const Model& m, double h0, double s);

/// Integral of the mortality rate along health_post over [0, s], by adaptive
/// Simpson at absolute tolerance 1e-10 (1 + s). Throws NumericsError on
/// non-convergence.
double integrated_mortality_post(const Model& m, double h_at_invest, double s);

}  // namespace hcinv
