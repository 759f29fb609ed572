/**
 * @file bench_core.cpp
 * @brief Timings of the hot paths: W and its partials, one boundary curve,
 *        J_hat evaluation and the policy inversion.
 */
#include <cmath>
#include <benchmark/benchmark.h>

#include "hcinv/policy.hpp"
#include "hcinv/simulator.hpp"

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

}  // namespace

static void BM_W_partials(benchmark::State& st) {
    double z = 0.5;
    for (auto _ : st) {
        benchmark::DoNotOptimize(W_partials(model(), {3.0, z, 1000.0}));
        z = z < 4 ? z * 1.01 : 0.5;
    }
}
BENCHMARK(BM_W_partials);

static void BM_solve_curve(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(solve_curve(model(), 1000.0, n));
}
BENCHMARK(BM_solve_curve)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_j_hat(benchmark::State& st) {
    const DualSlice d(model(), surface(), 5.0, 1000.0 * std::exp(-model().p().delta * 5.0));
    double z = 1.1 * d.boundary();
    for (auto _ : st) {
        benchmark::DoNotOptimize(d.eval(z));
        z = z < 50 ? z * 1.01 : 1.1 * d.boundary();
    }
}
BENCHMARK(BM_j_hat);

static void BM_z_star(benchmark::State& st) {
    const PrimalSlice s(model(), surface(), 5.0, 1000.0 * std::exp(-model().p().delta * 5.0));
    double x = 0.1 * s.kink_lo();
    for (auto _ : st) {
        benchmark::DoNotOptimize(s.z_star(x));
        x = x < 0.9 * s.kink_lo() ? x * 1.01 : 0.1 * s.kink_lo();
    }
}
BENCHMARK(BM_z_star);

static void BM_simulate(benchmark::State& st) {
    SimConfig c;
    c.n_paths = 200;
    c.n_steps = 100;
    c.initial_wealth = 60.0;
    for (auto _ : st) benchmark::DoNotOptimize(simulate_closed_loop(model(), surface(), c));
}
BENCHMARK(BM_simulate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
