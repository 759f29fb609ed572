/**
 * @file numerics.hpp
 * @brief Quadrature, normal CDF, bracketed roots, golden-section search and
 *        monotone interpolation shared by the solvers.
 */
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hcinv {

using RealFn = std::function<double(double)>;

/// Non-convergence in an iterative routine. Carries the best estimate and
/// the error bound that was actually achieved.
class NumericsError : public std::runtime_error {
public:
    NumericsError(const std::string& what, double best, double achieved)
        : std::runtime_error(what), best_estimate(best), achieved_error(achieved) {}
    double best_estimate;
    double achieved_error;
};

/// No sign change on the bracket.
class BracketError : public std::runtime_error {
public:
    BracketError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
        : std::runtime_error(what), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}
    double lo, hi, f_lo, f_hi;
};

double normal_cdf(double x);
double normal_pdf(double x);

enum class QuadratureMethod { Trapezoid, AdaptiveSimpson };

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::AdaptiveSimpson;
    double abs_tol = 1e-10;
    int max_depth = 40;
};

/// Integral of f over [a, b]. Trapezoid doubles its panel count until
/// successive estimates agree (max_depth doublings); AdaptiveSimpson
/// recurses with the usual Richardson correction.
double integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec = {});

struct BracketSpec {
    double lo = 0.0;
    double hi = 1.0;
    double tol = 1e-10;
    int max_iter = 200;
};

/// Bisection. Returns the midpoint of the final bracket, whose width is
/// at most tol. Deterministic for fixed inputs.
double find_root(const RealFn& f, const BracketSpec& spec);

/// Bracketed root with superlinear convergence (TOMS 748).
double find_root_fast(const RealFn& f, const BracketSpec& spec);

struct ScalarMin {
    double argmin;
    double min;
};

/// Golden-section search on a unimodal function.
ScalarMin minimize_scalar(const RealFn& f, double lo, double hi, double tol);

/// 12-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::array<double, 12> x;
    std::array<double, 12> w;
};
const GaussRule& gauss12();

/// Monotone piecewise-cubic (pchip) interpolant; falls back to linear for
/// fewer than four knots. Outside the knots the end values are held.
class MonotoneInterp {
public:
    MonotoneInterp() = default;
    MonotoneInterp(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_;
    std::shared_ptr<const std::function<double(double)>> cubic_;
};

/// Index i with x[i] <= v < x[i+1] on a sorted array, clamped to [0, n-2].
std::size_t bracket_index(const std::vector<double>& x, double v);

}  // namespace hcinv
