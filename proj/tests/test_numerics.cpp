#include <cmath>
#include <limits>
#include <random>
#include <doctest.h>

#include "hcinv/dual.hpp"
#include "hcinv/numerics.hpp"

using namespace hcinv;

namespace {

// Phi by its Taylor series, sum_k (-1)^k x^{2k+1} / (2^k k! (2k+1)), in long double.
double cdf_series(double x) {
    long double term = x, sum = x;
    const long double x2 = static_cast<long double>(x) * x;
    for (int k = 1; k < 200; ++k) {
        term *= -x2 / (2.0L * k);
        sum += term / (2 * k + 1);
    }
    return static_cast<double>(0.5L + sum / std::sqrt(2.0L * 3.14159265358979323846L));
}

}  // namespace

TEST_CASE("normal cdf") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(normal_cdf(0) == 0.5);
    CHECK(normal_cdf(-inf) == 0);
    CHECK(normal_cdf(inf) == 1);
    CHECK(std::abs(normal_cdf(1.96) - 0.9750021) < 1e-6);
    for (double x = -5; x <= 5; x += 0.37) {
        CHECK(std::abs(normal_cdf(x) - cdf_series(x)) < 1e-12);
        CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) < 1e-12);
    }
    CHECK(normal_pdf(0) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)));
}

TEST_CASE("quadrature") {
    for (auto method : {QuadratureMethod::Trapezoid, QuadratureMethod::AdaptiveSimpson}) {
        const QuadratureSpec spec{method, 1e-10, 40};
        CHECK(integrate([](double) { return 1.0; }, 0, 1, spec) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(integrate([](double x) { return x * x; }, 0, 1, spec) - 1.0 / 3) < 1e-10);
        const double exact = (1 - std::exp(-0.96)) / 0.048;
        CHECK(std::abs(integrate([](double s) { return std::exp(-0.048 * s); }, 0, 20, spec) - exact) < 1e-9);
    }
    // additivity
    auto f = [](double x) { return std::sin(x) * std::exp(-x / 3); };
    const double ab = integrate(f, 0, 1.3), bc = integrate(f, 1.3, 4), ac = integrate(f, 0, 4);
    CHECK(std::abs(ab + bc - ac) <= 2e-10);
}

TEST_CASE("quadrature reports non-convergence") {
    const QuadratureSpec spec{QuadratureMethod::AdaptiveSimpson, 1e-14, 3};
    try {
        integrate([](double x) { return std::sqrt(x); }, 0, 1, spec);
        FAIL("expected NumericsError");
    } catch (const NumericsError& e) {
        CHECK(e.best_estimate == doctest::Approx(2.0 / 3).epsilon(1e-2));
        CHECK(e.achieved_error > 1e-14);
    }
}

TEST_CASE("bisection root finding") {
    CHECK(std::abs(find_root([](double x) { return x - 2; }, {0, 10, 1e-10, 200}) - 2) <= 1e-10);
    // Newton oracle for x^3 - x - 2
    double r = 1.5;
    for (int i = 0; i < 50; ++i) r -= (r * r * r - r - 2) / (3 * r * r - 1);
    const double got = find_root([](double x) { return x * x * x - x - 2; }, {1, 2, 1e-12, 200});
    CHECK(std::abs(got - r) <= 1e-12);
    CHECK(got >= 1);
    CHECK(got <= 2);
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1; }, {-1, 1, 1e-10, 200}), BracketError);
    try {
        find_root([](double) { return 3.0; }, {0, 1, 1e-10, 200});
    } catch (const BracketError& e) {
        CHECK(e.f_lo == 3.0);
        CHECK(e.f_hi == 3.0);
    }
    // deterministic
    auto f = [](double x) { return std::cos(x) - x; };
    CHECK(find_root(f, {0, 1, 1e-13, 200}) == find_root(f, {0, 1, 1e-13, 200}));
    CHECK(std::abs(find_root_fast(f, {0, 1, 1e-13, 200}) - find_root(f, {0, 1, 1e-13, 200})) < 1e-12);
}

TEST_CASE("golden-section minimization") {
    CHECK(std::abs(minimize_scalar([](double x) { return (x - 3) * (x - 3); }, 0, 10, 1e-8).argmin - 3) < 1e-7);
    CHECK(std::abs(minimize_scalar([](double x) { return x + 1 / x; }, 0.1, 10, 1e-8).argmin - 1) < 1e-7);
}

TEST_CASE("golden section on the post-investment dual objective matches a grid scan") {
    const Model m;
    const double h = 1000, x = 50, g0 = m.g_value(0);
    auto f = [&](double lz) {
        const double z = std::exp(lz);
        return W_value(m, {0, z, h}) + z * (x - g0);
    };
    const double tol = 1e-6;
    const ScalarMin got = minimize_scalar(f, std::log(1e-3), std::log(1e3), tol);
    double best = 0, best_v = std::numeric_limits<double>::infinity();
    // 10^5-point scan on a bracket around the argmin, two passes
    double lo = std::log(1e-3), hi = std::log(1e3);
    for (int pass = 0; pass < 2; ++pass) {
        const int n = 50000;
        for (int i = 0; i <= n; ++i) {
            const double lz = lo + (hi - lo) * i / n;
            const double v = f(lz);
            if (v < best_v) best_v = v, best = lz;
        }
        const double w = (hi - lo) / n;
        lo = best - 2 * w;
        hi = best + 2 * w;
    }
    CHECK(std::abs(got.argmin - best) <= 10 * tol);
}

TEST_CASE("monotone interpolation") {
    const std::vector<double> x{0, 1, 2, 3, 4, 5}, y{0, 0.1, 0.15, 2, 2.1, 2.1};
    const MonotoneInterp f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f(x[i]) == doctest::Approx(y[i]));
    double prev = f(0);
    for (double t = 0; t <= 5; t += 0.01) {
        CHECK(f(t) >= prev - 1e-15);
        prev = f(t);
    }
    CHECK(f(-1) == 0);
    CHECK(f(9) == doctest::Approx(2.1));
    const MonotoneInterp lin({0, 1}, {1, 3});
    CHECK(lin(0.25) == doctest::Approx(1.5));
    CHECK(bracket_index(x, 2.5) == 2);
    CHECK(bracket_index(x, 99) == 4);
    CHECK(bracket_index(x, -1) == 0);
}
