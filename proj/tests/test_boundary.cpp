#include <algorithm>
#include <cmath>
#include <doctest.h>

#include "hcinv/boundary.hpp"
#include "hcinv/dual.hpp"
#include "hcinv/health.hpp"
#include "hcinv/numerics.hpp"

using namespace hcinv;

namespace {

const BoundarySurface& surface200() {
    static const BoundarySurface s = solve_surface(Model{}, {2.0, 1000.0}, 200, 2);
    return s;
}

double sup_diff_common(const BoundaryCurve& coarse, const BoundaryCurve& fine) {
    const std::size_t r = fine.n() / coarse.n();
    double d = 0;
    for (std::size_t k = 0; k <= coarse.n(); ++k) d = std::max(d, std::abs(coarse.values[k] - fine.values[k * r]));
    return d;
}

}  // namespace

TEST_CASE("kernel limits") {
    const Model m;
    const double T = m.p().horizon, xi = 5.0, h = 1000.0;
    const double b = 0.8;
    const double gam = gamma_fn(m, T - xi, h);
    const double half = 0.5 * (b * m.p().invest_amount - m.d().f_of_I * gam * std::pow(b, m.d().a));
    CHECK(kernel_G(m, xi, 0.0, b, b, h) == doctest::Approx(half).epsilon(1e-12));
    // the s -> 0+ limit along s = 10^-k approaches the convention
    double prev_err = 1e9;
    for (int k = 4; k <= 10; k += 2) {
        const double err = std::abs(kernel_G(m, xi, std::pow(10.0, -k), b, b, h) - half);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-4 * std::abs(half));

    // a vanished boundary at the later time puts every path in continuation:
    // Phi = 1 and the Gamma term survives unless Gamma = 0
    const KernelTerms kt = kernel_terms(m, 2.0, h);
    const KernelEval e = kernel_eval(m, kt, 0.0, b, 0.0);
    CHECK(e.g == doctest::Approx(kt.disc * kt.n2 * m.p().invest_amount * b).epsilon(1e-14));
}

TEST_CASE("kernel sign above the upper bound") {
    const Model m;
    for (double h : {2.0, 1000.0})
        for (double xi : {1.0, 10.0, 19.0}) {
            const double t = m.p().horizon - xi;
            const double g = boundary_upper_bound(m, t, h);
            CHECK(kernel_G(m, xi, 0.0, 1.2 * g, 1.2 * g, h) > 0);
        }
}

TEST_CASE("kernel z-derivatives are exact derivatives of the kernel") {
    const Model m;
    const KernelTerms kt = kernel_terms(m, 1.5, 300.0);
    const double gam = 2.0, y = 0.9;
    for (double z : {0.5, 0.9, 1.3, 4.0}) {
        const double dz = 1e-5 * z;
        const KernelEval e = kernel_eval(m, kt, gam, z, y);
        const double fd1 = (kernel_eval(m, kt, gam, z + dz, y).g - kernel_eval(m, kt, gam, z - dz, y).g) / (2 * dz);
        const double fd2 =
            (kernel_eval(m, kt, gam, z + dz, y).g_z - kernel_eval(m, kt, gam, z - dz, y).g_z) / (2 * dz);
        CHECK(e.g_z == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(e.g_zz == doctest::Approx(fd2).epsilon(1e-6));
    }
}

TEST_CASE("first-panel endpoint average") {
    const Model m;
    const double b = 0.7, vol = 0.3, gam = 1.7;
    const KernelEval at_b = kernel_endpoint(m, gam, b, b, vol);
    const KernelEval conv = kernel_eval(m, kernel_terms(m, 0.0, 100.0), gam, b, b);
    CHECK(at_b.g == doctest::Approx(conv.g).epsilon(1e-14));
    // far above b the average tends to the indicator
    const double z = b * 1e6;
    const KernelEval far = kernel_endpoint(m, gam, z, b, vol);
    CHECK(far.g == doctest::Approx(m.p().invest_amount * z - m.d().f_of_I * gam * std::pow(z, m.d().a)).epsilon(1e-12));
    CHECK(std::abs(kernel_endpoint(m, gam, b * 1e-6, b, vol).g) < 1e-12);
    // closed-form average against a midpoint rule in u, and derivatives against differences
    for (double zz : {0.5, 0.69, 0.71, 1.0, 2.0}) {
        const double q = std::log(zz / b) / vol;
        double avg = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double u = (i + 0.5) / n;
            avg += 2 * (1 - u) * normal_cdf(q / std::sqrt(u)) / n;
        }
        const KernelEval e = kernel_endpoint(m, gam, zz, b, vol);
        const double direct = (m.p().invest_amount * zz - m.d().f_of_I * gam * std::pow(zz, m.d().a)) * avg;
        CHECK(e.g == doctest::Approx(direct).epsilon(1e-5));
        const double dz = 1e-6 * zz;
        const double fd1 = (kernel_endpoint(m, gam, zz + dz, b, vol).g - kernel_endpoint(m, gam, zz - dz, b, vol).g) / (2 * dz);
        const double fd2 =
            (kernel_endpoint(m, gam, zz + dz, b, vol).g_z - kernel_endpoint(m, gam, zz - dz, b, vol).g_z) / (2 * dz);
        CHECK(e.g_z == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(e.g_zz == doctest::Approx(fd2).epsilon(1e-5));
    }
}

TEST_CASE("curve invariants") {
    const Model m;
    for (const auto& c : surface200().curves) {
        CHECK(c.values[0] == 0.0);
        CHECK(c.n() == 200);
        for (std::size_t k = 1; k <= c.n(); ++k) {
            CHECK(c.values[k] > 0);
            CHECK(c.values[k] <= c.upper[k]);
            CHECK(c.xi_grid[k] > c.xi_grid[k - 1]);
            CHECK(c.t_grid[k] == doctest::Approx(m.p().horizon - c.xi_grid[k]));
            CHECK(c.health[k] == doctest::Approx(health_pre(m, c.h_ref, c.t_grid[k])).epsilon(1e-14));
        }
        CHECK(c.xi_grid.back() == doctest::Approx(m.p().horizon));
    }
}

TEST_CASE("stage-one root against a grid scan") {
    const Model m;
    const double T = m.p().horizon, h = 1000.0;
    const BoundaryCurve c = solve_curve(m, h, 20);
    const double dx = c.dxi(), t1 = T - dx;
    const double h1 = health_pre(m, h, t1);
    auto stage = [&](double b) { return 0.5 * dx * (kernel_G(m, dx, 0.0, b, b, h1) + kernel_G(m, dx, dx, b, 0.0, h1)); };
    const double hi = boundary_upper_bound(m, t1, h1) * 2;
    const int n = 100000;
    double root = 0;
    for (int i = 0; i < n; ++i) {
        const double a = hi * i / n + 1e-12, b = hi * (i + 1) / n;
        if ((stage(a) > 0) != (stage(b) > 0)) {
            root = find_root(stage, {a, b, 1e-15, 200});
            break;
        }
    }
    CHECK(root > 0);
    CHECK(c.values[1] == doctest::Approx(root).epsilon(1e-8));
}

TEST_CASE("surface equals per-curve solves") {
    const Model m;
    const BoundarySurface s = solve_surface(m, {7.0}, 30, 1);
    const BoundaryCurve c = solve_curve(m, 7.0, 30);
    REQUIRE(s.curves.size() == 1);
    CHECK(s.curves[0].values == c.values);
    // thread count does not change results
    const BoundarySurface a = solve_surface(m, {2.0, 50.0, 1000.0}, 30, 1);
    const BoundarySurface b = solve_surface(m, {2.0, 50.0, 1000.0}, 30, 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.curves[i].values == b.curves[i].values);
}

TEST_CASE("mesh halving shrinks the sup difference") {
    const Model m;
    for (double h : {2.0, 1000.0}) {
        const BoundaryCurve c50 = solve_curve(m, h, 50), c100 = solve_curve(m, h, 100), c200 = solve_curve(m, h, 200),
                            c400 = solve_curve(m, h, 400);
        const double d1 = sup_diff_common(c50, c100), d2 = sup_diff_common(c100, c200), d3 = sup_diff_common(c200, c400);
        CHECK(d2 < d1);
        CHECK(d3 < d2);
    }
}

TEST_CASE("residuals") {
    const Model m;
    BoundaryCurve c = solve_curve(m, 1000.0, 50);
    for (std::size_t k = 1; k <= c.n(); ++k) CHECK(std::abs(residual(m, c, k, 1)) < 1e-9);
    const std::vector<double> all = all_residuals(m, c, 4);
    for (std::size_t k : {5u, 20u, 45u}) CHECK(all[k] == doctest::Approx(residual(m, c, k, 4)).epsilon(1e-10));
    // the stage function increases through its root
    for (std::size_t k = 3; k <= c.n(); k += 5) {
        BoundaryCurve p = c;
        p.values[k] *= 1.05;
        p.build_interpolants();
        CHECK(residual(m, p, k, 1) > 0);
    }
}

TEST_CASE("surface lookups follow health characteristics") {
    const Model m;
    const auto& s = surface200();
    const auto& c = s.curves[1];
    for (std::size_t k : {10u, 100u, 190u})
        CHECK(boundary_value(m, s, c.t_grid[k], c.health[k]) == doctest::Approx(c.values[k]).epsilon(1e-10));
    CHECK_THROWS_AS(boundary_value(m, s, 10.0, 5000.0), std::out_of_range);
    CHECK_THROWS_AS(solve_curve(m, 1000.0, 1), std::invalid_argument);
}
