#include <cmath>
#include <functional>
#include <doctest.h>

#include "hcinv/health.hpp"

using namespace hcinv;

namespace {

// Romberg-style oracle: trapezoid at n and 2n panels, Richardson-combined.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

double richardson(const std::function<double(double)>& f, double a, double b, int n) {
    return (4.0 * trapezoid(f, a, b, 2 * n) - trapezoid(f, a, b, n)) / 3.0;
}

}  // namespace

TEST_CASE("pre-investment health decays exponentially") {
    const Model m;
    CHECK(health_pre(m, 1000, 0) == 1000);
    CHECK(health_pre(m, 1000, 20) == doctest::Approx(895.834).epsilon(1e-6));
    CHECK(health_pre(m, 1000, 20) == doctest::Approx(1000 * std::exp(-0.11)).epsilon(1e-15));
    for (double s = 0; s < 20; s += 0.5) CHECK(health_pre(m, 1000, s + 0.5) < health_pre(m, 1000, s));
}

TEST_CASE("post-investment health closed form and steady state") {
    const Model m;
    const double steady = std::pow(2.0, 0.19) / 0.0055;
    CHECK(steady == doctest::Approx(207.41).epsilon(1e-4));
    CHECK(health_post(m, 50, 0) == 50);
    CHECK(health_post(m, 50, 1e4) == doctest::Approx(steady).epsilon(1e-6));
    CHECK(health_post(m, 100, 20) == doctest::Approx(111.19).epsilon(1e-4));
    for (double h : {2.0, 100.0, 1000.0})
        for (double s : {0.0, 1.0, 5.0, 20.0}) CHECK(health_post(m, h, s) >= health_pre(m, h, s));
}

TEST_CASE("mortality intensity") {
    const Model m;
    CHECK(mortality(m, 1e12) == doctest::Approx(0.0237).epsilon(1e-9));
    CHECK(std::abs(mortality(m, 1e12) - 0.0237) < 1e-9);
    CHECK(mortality(m, 2) == doctest::Approx(0.0237 + 0.0017 * std::pow(2.0, -1.8)).epsilon(1e-15));
    for (double h = 0.5; h < 2000; h *= 1.7) CHECK(mortality(m, h * 1.7) < mortality(m, h));
    CHECK_THROWS_AS(mortality(m, 0.0), std::domain_error);
    CHECK_THROWS_AS(mortality(m, -1.0), std::domain_error);
    // tiny health is evaluated exactly, never clamped
    CHECK(mortality(m, 1e-7) == doctest::Approx(0.0237 + 0.0017 * std::pow(1e-7, -1.8)));
}

TEST_CASE("integrated pre-investment mortality against quadrature") {
    const Model m;
    CHECK(integrated_mortality_pre(m, 2, 0) == 0);
    for (double h0 : {2.0, 1000.0})
        for (double s : {1.0, 10.0, 20.0}) {
            const double exact = integrated_mortality_pre(m, h0, s);
            const double quad =
                richardson([&](double u) { return mortality(m, health_pre(m, h0, u)); }, 0, s, 4000);
            CHECK(exact == doctest::Approx(quad).epsilon(1e-10));
            CHECK(exact >= 0.0237 * s);
        }
}

TEST_CASE("integrated pre-investment mortality is convex in s") {
    const Model m;
    for (double h0 : {2.0, 100.0, 1000.0}) {
        const double ds = 0.25;
        for (double s = ds; s < 20; s += ds) {
            const double second = integrated_mortality_pre(m, h0, s + ds) - 2 * integrated_mortality_pre(m, h0, s) +
                                  integrated_mortality_pre(m, h0, s - ds);
            CHECK(second >= -1e-9);
        }
    }
}

TEST_CASE("integrated post-investment mortality") {
    const Model m;
    CHECK(integrated_mortality_post(m, 100, 0) == 0);
    const double quad = richardson([&](double u) { return mortality(m, health_post(m, 100, u)); }, 0, 5, 5000);
    CHECK(integrated_mortality_post(m, 100, 5) == doctest::Approx(quad).epsilon(1e-8));
    for (double h : {2.0, 100.0, 1000.0})
        for (double s : {1.0, 10.0, 20.0}) {
            CHECK(integrated_mortality_post(m, h, s) <= integrated_mortality_pre(m, h, s));
            CHECK(integrated_mortality_post(m, h, s) > integrated_mortality_post(m, h, s / 2));
        }
}

TEST_CASE("post-investment mortality shapes") {
    const Model m;
    // healthy: still rising after investment, but slower than without it
    for (double s = 1; s < 20; s += 1) {
        const double pre_rate = mortality(m, health_pre(m, 1000, s + 1)) - mortality(m, health_pre(m, 1000, s));
        const double post_rate = mortality(m, health_post(m, 1000, s + 1)) - mortality(m, health_post(m, 1000, s));
        CHECK(post_rate > 0);
        CHECK(post_rate < pre_rate);
    }
    // h = 100 sits below the steady state, so mortality eventually falls
    // toward its floor at f(I)/delta
    const double floor = mortality(m, std::pow(2.0, 0.19) / 0.0055);
    CHECK(mortality(m, health_post(m, 100, 40)) < mortality(m, health_post(m, 100, 20)));
    CHECK(mortality(m, health_post(m, 100, 400)) == doctest::Approx(floor).epsilon(1e-6));
    CHECK(mortality(m, health_post(m, 100, 400)) > 0.0237);
}
