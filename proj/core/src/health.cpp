#include "hcinv/health.hpp"

#include <cmath>
#include <stdexcept>

#include "hcinv/numerics.hpp"

namespace hcinv {

double health_pre(const Model& m, double h0, double s) {
    return h0 * std::exp(-m.p().delta * s);
}

double health_post(const Model& m, double h, double s) {
    const double e = std::exp(-m.p().delta * s);
    return h * e - m.d().f_of_I / m.p().delta * std::expm1(-m.p().delta * s);
}

double mortality(const Model& m, double h) {
    if (!(h > 0)) throw std::domain_error("mortality: health must be positive");
    return m.p().m0 + m.p().m1 * std::pow(h, -m.p().kappa);
}

double integrated_mortality_pre(const Model& m, double h0, double s) {
    const auto& p = m.p();
    const double dk = p.delta * p.kappa;
    return p.m0 * s + p.m1 * std::pow(h0, -p.kappa) * std::expm1(dk * s) / dk;
}

double integrated_mortality_post(const Model& m, double h, double s) {
    if (s <= 0) return 0.0;
    QuadratureSpec spec{QuadratureMethod::AdaptiveSimpson, 1e-10 * (1.0 + s), 50};
    return integrate([&](double u) { return mortality(m, health_post(m, h, u)); }, 0.0, s, spec);
}

}  // namespace hcinv
