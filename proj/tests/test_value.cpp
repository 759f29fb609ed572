#include <cmath>
#include <doctest.h>

#include "hcinv/value.hpp"

using namespace hcinv;

namespace {

const Model& model() {
    static const Model m;
    return m;
}

const BoundarySurface& surface() {
    static const BoundarySurface s = solve_surface(model(), {2.0, 1000.0}, 100, 2);
    return s;
}

double envelope(double t, double z) {
    const auto& p = model().p();
    return p.invest_amount * z / p.r * (1 - std::exp(-p.r * (p.horizon - t)));
}

}  // namespace

TEST_CASE("J_hat vanishes on the stopping region and at T") {
    const Model& m = model();
    const auto& s = surface();
    for (const auto& c : s.curves)
        for (std::size_t k : {1u, 4u, 10u, 20u, 60u, 100u}) {
            const double t = c.t_grid[k], h = c.health[k], b = c.values[k];
            CHECK(j_hat(m, s, {t, b, h}) == 0.0);
            CHECK(j_hat(m, s, {t, 0.5 * b, h}) == 0.0);
            if (k >= 10) CHECK(j_hat(m, s, {t, b * (1 + 1e-3), h}) > 0.0);
        }
    CHECK(j_hat(m, s, {20.0, 3.0, 850.0}) == 0.0);
}

TEST_CASE("the dip below zero next to T shrinks with the mesh") {
    // At the first nodes below T the coarse first stage leaves J_hat slightly
    // negative just above b; relative to b the dip falls like sqrt(dxi).
    const Model& m = model();
    double prev = INFINITY;
    for (int n : {50, 100, 200}) {
        const BoundarySurface s = solve_surface(m, {1000.0}, n, 1);
        const auto& c = s.curves[0];
        const double b = c.values[1];
        double lo = 0;
        for (double e = 1e-4; e < 1; e *= 1.2) lo = std::min(lo, j_hat(m, s, {c.t_grid[1], b * (1 + e), c.health[1]}));
        CHECK(-lo / b < prev);
        CHECK(-lo / b < 0.2);
        prev = -lo / b;
    }
}

TEST_CASE("envelope, monotonicity and small-z limit") {
    const Model m;
    const auto& s = surface();
    for (double t : {0.0, 4.0, 11.0, 18.5})
        for (double h0 : {2.0, 1000.0}) {
            const double h = h0 * std::exp(-m.p().delta * t);
            double prev = 0;
            for (double z = 0.01; z < 100; z *= 1.3) {
                const double j = j_hat(m, s, {t, z, h});
                CHECK(j >= 0);
                CHECK(j <= envelope(t, z) * (1 + 1e-12));
                CHECK(j >= prev);
                prev = j;
            }
            for (int k = 1; k <= 8; ++k) CHECK(j_hat(m, s, {t, std::pow(10.0, -k), h}) == 0.0);
        }
}

TEST_CASE("J decomposition and the stopping region") {
    const Model& m = model();
    const auto& s = surface();
    const auto& c = s.curves[1];
    const std::size_t k = 50;
    const DualSlice d(m, s, c.t_grid[k], c.health[k]);
    const double b = d.boundary();
    CHECK(b == doctest::Approx(c.values[k]).epsilon(1e-14));
    for (double z : {0.3 * b, 0.9 * b}) {
        const JValue v = d.eval(z);
        CHECK(v.stopping);
        CHECK(v.j == doctest::Approx(d.w_hat(z)).epsilon(1e-14));
        CHECK(v.j_z == doctest::Approx(d.w_hat_z(z)).epsilon(1e-14));
    }
    for (double z : {1.5 * b, 4 * b}) {
        const JValue v = d.eval(z);
        CHECK_FALSE(v.stopping);
        const DualPoint p{c.t_grid[k], z, c.health[k]};
        CHECK(v.j == doctest::Approx(j_hat(m, s, p) + W_value(m, p) - z * m.g_value(p.t)).epsilon(1e-12));
        CHECK(j_value(m, s, p) == doctest::Approx(v.j).epsilon(1e-14));
        CHECK(j_z(m, s, p) == doctest::Approx(v.j_z).epsilon(1e-14));
        CHECK(j_zz(m, s, p) == doctest::Approx(v.j_zz).epsilon(1e-14));
    }
}

TEST_CASE("analytic z-derivatives match centered differences") {
    const Model& m = model();
    const auto& s = surface();
    for (double t : {0.0, 7.3, 15.0})
        for (double h0 : {2.0, 1000.0}) {
            const double h = h0 * std::exp(-m.p().delta * t);
            const DualSlice d(m, s, t, h);
            for (double f : {1.2, 2.0, 10.0, 100.0}) {
                const double z = f * d.boundary(), dz = std::max(1e-4, 1e-4 * z);
                const JValue v = d.eval(z);
                const double fd1 = (d.eval(z + dz).j - d.eval(z - dz).j) / (2 * dz);
                const double fd2 = (d.eval(z + dz).j - 2 * v.j + d.eval(z - dz).j) / (dz * dz);
                CHECK(v.j_z == doctest::Approx(fd1).epsilon(1e-6).scale(1));
                CHECK(v.j_zz == doctest::Approx(fd2).epsilon(1e-3));
                CHECK(v.j_zz > 0);
            }
        }
}

TEST_CASE("J_z tends to zero for large z") {
    const Model& m = model();
    const DualSlice d(m, surface(), 0.0, 1000.0);
    // the trapezoid bias left at large z is O(dxi^2)
    const double dx = m.p().horizon / 100;
    CHECK(std::abs(d.eval_continuation(1e9).j_z) < dx * dx * m.p().invest_amount);
}

TEST_CASE("Monte Carlo oracle for J_hat") {
    const Model& m = model();
    const auto& s = surface();
    const double h = 1000.0;
    const double b0 = DualSlice(m, s, 0.0, h).boundary();
    const DualPoint p{0.0, 2 * b0, h};
    const double q = j_hat(m, s, p);
    CHECK(q > 0);
    CHECK(q <= envelope(0, p.z));
    const MCEstimate e = mc_j_hat(m, s, p, 4000, 200, 17, 1.0, 2);
    CHECK(std::abs(e.estimate - q) <= 3 * e.std_error);

    // doubling the paths shrinks the standard error by about 1/sqrt(2)
    const MCEstimate e2 = mc_j_hat(m, s, p, 8000, 200, 17, 1.0, 2);
    CHECK(e2.std_error / e.std_error == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.2));

    // immediately stopped paths pay nothing
    const MCEstimate zero = mc_j_hat(m, s, {0.0, 0.01 * b0, h}, 100, 50, 3);
    CHECK(zero.estimate == 0.0);
    CHECK(zero.mean_tau == 0.0);

    // reproducible for a fixed seed and independent of threads
    const MCEstimate a = mc_j_hat(m, s, p, 500, 100, 9, 1.0, 1);
    const MCEstimate b = mc_j_hat(m, s, p, 500, 100, 9, 1.0, 3);
    CHECK(a.estimate == b.estimate);
}

TEST_CASE("MC agreement on a lattice and dominance of perturbed rules") {
    const Model& m = model();
    const auto& s = surface();
    for (double t : {0.0, 10.0})
        for (double h0 : {2.0, 1000.0}) {
            const double h = h0 * std::exp(-m.p().delta * t);
            const double b = DualSlice(m, s, t, h).boundary();
            const DualPoint p{t, 3 * b, h};
            const double q = j_hat(m, s, p);
            const MCEstimate e = mc_j_hat(m, s, p, 3000, 200, 101, 1.0, 2);
            CHECK(std::abs(e.estimate - q) <= 3 * e.std_error);
            for (double scale : {0.9, 1.1}) {
                const MCEstimate r = mc_j_hat(m, s, p, 3000, 200, 202, scale, 2);
                CHECK(q >= r.estimate - 2 * r.std_error);
            }
        }
}

TEST_CASE("value surface lattice") {
    const Model& m = model();
    const ValueSurface v = build_value_surface(m, surface(), {0.0, 10.0, 20.0}, {0.1, 1.0, 10.0}, {2.5, 850.0}, 2);
    REQUIRE(v.j_hat.size() == 18);
    for (std::size_t ih = 0; ih < 2; ++ih)
        for (std::size_t iz = 0; iz < 3; ++iz) CHECK(v.j_hat[v.index(2, ih, iz)] == 0.0);
    const std::size_t i = v.index(1, 1, 2);
    const DualPoint p{10.0, 10.0, 850.0};
    CHECK(v.j_hat[i] == doctest::Approx(j_hat(m, surface(), p)).epsilon(1e-12));
}
