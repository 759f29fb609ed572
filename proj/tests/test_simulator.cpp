#include <algorithm>
#include <cmath>
#include <doctest.h>

#include "hcinv/health.hpp"
#include "hcinv/simulator.hpp"

using namespace hcinv;

namespace {

const Model& model() {
    static const Model m;
    return m;
}

const BoundarySurface& surface() {
    static const BoundarySurface s = solve_surface(model(), {100.0, 1000.0}, 100, 2);
    return s;
}

SimConfig small(StopPolicy pol, std::size_t paths = 200) {
    SimConfig c;
    c.n_paths = paths;
    c.n_steps = 100;
    c.seed = 42;
    c.policy = pol;
    c.initial_wealth = 60.0;
    c.initial_health = 1000.0;
    c.threads = 2;
    return c;
}

}  // namespace

TEST_CASE("passive never-invest wealth grows at r") {
    SimConfig c = small(StopPolicy::NeverInvest, 5);
    c.passive = true;
    const PathBundle b = simulate_closed_loop(model(), surface(), c);
    const double dt = model().p().horizon / c.n_steps;
    for (std::size_t i = 0; i < b.n_paths; ++i) {
        for (std::size_t j = 0; j <= b.n_steps; j += 10)
            CHECK(b.at(b.wealth, i, j) == doctest::Approx(60.0 * std::pow(1 + model().p().r * dt, j)).epsilon(1e-12));
        CHECK(b.invest_step[i] == -1);
        CHECK(std::isnan(b.invest_time[i]));
        CHECK(b.path_welfare[i] == 0.0);
    }
    CHECK(welfare_estimate(model(), b).estimate == 0.0);
    CHECK(b.n_absorbed == 0);
}

TEST_CASE("health splices continuously at the investment time") {
    const PathBundle b = simulate_closed_loop(model(), surface(), small(StopPolicy::OptimalBoundary));
    std::size_t invested = 0;
    for (std::size_t i = 0; i < b.n_paths; ++i) {
        const int k = b.invest_step[i];
        if (k < 0) continue;
        ++invested;
        const auto j = static_cast<std::size_t>(k);
        CHECK(b.at(b.health, i, j) == doctest::Approx(health_pre(model(), 1000.0, b.times[j])).epsilon(1e-12));
        if (j + 1 <= b.n_steps) {
            const double jump = std::abs(b.at(b.health, i, j + 1) - b.at(b.health, i, j));
            CHECK(jump < 0.05 * b.at(b.health, i, j));
            CHECK(b.at(b.health, i, j + 1) == doctest::Approx(health_post(model(), b.at(b.health, i, j), b.times[j + 1] - b.times[j])).epsilon(1e-12));
        }
    }
    CHECK(invested > 0);

    const HealthSeries hs = simulate_health_mortality(model(), 1000.0, 5.0, 400);
    for (std::size_t j = 1; j < hs.t.size(); ++j)
        CHECK(std::abs(hs.health[j] - hs.health[j - 1]) < 0.01 * hs.health[j - 1]);
}

TEST_CASE("results are reproducible and thread independent") {
    SimConfig c = small(StopPolicy::OptimalBoundary, 50);
    c.threads = 1;
    const PathBundle a = simulate_closed_loop(model(), surface(), c);
    c.threads = 4;
    const PathBundle b = simulate_closed_loop(model(), surface(), c);
    CHECK(a.terminal_wealth == b.terminal_wealth);
    CHECK(a.path_welfare == b.path_welfare);
    c.seed = 43;
    const PathBundle d = simulate_closed_loop(model(), surface(), c);
    CHECK(a.terminal_wealth != d.terminal_wealth);
}

TEST_CASE("welfare standard error shrinks like 1/sqrt(n)") {
    const WelfareEstimate a = welfare_estimate(model(), simulate_closed_loop(model(), surface(), small(StopPolicy::OptimalBoundary, 400)));
    const WelfareEstimate b = welfare_estimate(model(), simulate_closed_loop(model(), surface(), small(StopPolicy::OptimalBoundary, 1600)));
    CHECK(a.std_error > 0);
    CHECK(b.std_error / a.std_error == doctest::Approx(0.5).epsilon(0.2));
    // the series-based estimate matches the per-path accumulation
    const PathBundle p = simulate_closed_loop(model(), surface(), small(StopPolicy::OptimalBoundary, 100));
    double mean = 0;
    for (double w : p.path_welfare) mean += w / 100;
    CHECK(welfare_estimate(model(), p).estimate == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("optimal stopping is not beaten by a threshold rule") {
    const WelfareEstimate opt =
        welfare_estimate(model(), simulate_closed_loop(model(), surface(), small(StopPolicy::OptimalBoundary, 800)));
    SimConfig c = small(StopPolicy::FixedThreshold, 800);
    c.threshold_factor = 2.0;
    const WelfareEstimate thr = welfare_estimate(model(), simulate_closed_loop(model(), surface(), c));
    CHECK(opt.estimate >= thr.estimate - 2 * std::hypot(opt.std_error, thr.std_error));
}

TEST_CASE("invest-immediately pays from time zero") {
    const PathBundle b = simulate_closed_loop(model(), surface(), small(StopPolicy::InvestImmediately, 20));
    for (std::size_t i = 0; i < b.n_paths; ++i) {
        CHECK(b.invest_step[i] == 0);
        CHECK(b.invest_time[i] == 0.0);
    }
}

TEST_CASE("configuration errors") {
    SimConfig c = small(StopPolicy::OptimalBoundary, 1);
    c.n_steps = 1;
    CHECK_THROWS_AS(simulate_closed_loop(model(), surface(), c), std::invalid_argument);
    c = small(StopPolicy::OptimalBoundary, 1);
    c.initial_time = 20.0;
    CHECK_THROWS_AS(simulate_closed_loop(model(), surface(), c), std::domain_error);
    c = small(StopPolicy::OptimalBoundary, 1);
    c.initial_wealth = 0;
    CHECK_THROWS_AS(simulate_closed_loop(model(), surface(), c), std::domain_error);
}

TEST_CASE("health and mortality for an agent at h = 100") {
    const HealthSeries never = simulate_health_mortality(model(), 100.0, 1e9, 200);
    const HealthSeries now = simulate_health_mortality(model(), 100.0, 0.0, 200);
    for (std::size_t j = 1; j < never.t.size(); ++j) {
        CHECK(never.mortality[j] > never.mortality[j - 1]);
        // below the post-investment steady state health rises and mortality falls
        CHECK(now.health[j] > now.health[j - 1]);
        CHECK(now.mortality[j] < now.mortality[j - 1]);
    }
    CHECK(now.mortality.back() > model().p().m0);
}

TEST_CASE("the Milstein step tightens the wealth-dual identity") {
    const Model& m = model();
    const auto& s = surface();
    const double x0 = -j_z(m, s, {0.0, 2 * boundary_value(m, s, 0.0, 1000.0), 1000.0});
    SimConfig c = small(StopPolicy::OptimalBoundary, 30);
    c.initial_wealth = x0;
    c.exact_policy = true;
    c.track_identity = true;
    c.keep_series = false;
    c.n_steps = 200;
    auto worst = [&](bool milstein) {
        c.milstein = milstein;
        const PathBundle b = simulate_closed_loop(m, s, c);
        return *std::max_element(b.identity_error.begin(), b.identity_error.end());
    };
    const double euler = worst(false), mil = worst(true);
    CHECK(mil < 0.5 * euler);
    CHECK(mil < 0.1 * x0);
}
