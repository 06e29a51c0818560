#include "psde/density.hpp"
#include "psde/malliavin.hpp"
#include "psde/rng.hpp"
#include "psde/simulate.hpp"
#include "psde/skorokhod.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace psde;

CoefficientModel smooth_model() {
    return make_model(coefficient::sinusoidal(0.1, 0.5, 1.0), coefficient::sinusoidal(1.0, 0.3, 1.5));
}

std::vector<double> walk(std::size_t n, std::uint64_t seed) {
    const auto dw = brownian_driver(n - 1, 1.0, seed);
    std::vector<double> a(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) a[k] = a[k - 1] + dw[k - 1];
    return a;
}

void BM_SolveMaxMin(benchmark::State& state) {
    const auto a = walk(static_cast<std::size_t>(state.range(0)), 1);
    const auto params = make_params(0.3, -0.2);
    for (auto _ : state) benchmark::DoNotOptimize(solve_max_min(a, params));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveMaxMin)->RangeMultiplier(10)->Range(1000, 100000)->Complexity();

void BM_SimulatePerStep(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_steps = static_cast<std::size_t>(state.range(0));
    cfg.seed = 2;
    const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, cfg.seed);
    const auto model = smooth_model();
    const auto params = make_params(0.3, -0.2);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_per_step(model, params, cfg, dw));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimulatePerStep)->RangeMultiplier(10)->Range(1000, 100000)->Complexity();

void BM_SimulatePicard(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_steps = static_cast<std::size_t>(state.range(0));
    cfg.seed = 2;
    const auto dw = brownian_driver(cfg.n_steps, cfg.horizon, cfg.seed);
    const auto model = smooth_model();
    const auto params = make_params(0.3, -0.2);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_picard(model, params, cfg, dw));
}
BENCHMARK(BM_SimulatePicard)->Arg(1000)->Arg(10000);

void BM_DerivativeField(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_steps = static_cast<std::size_t>(state.range(0));
    cfg.seed = 3;
    const auto model = smooth_model();
    const auto params = make_params(0.3, -0.2);
    const auto path = simulate_per_step(model, params, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(derivative_field(path, model, params));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DerivativeField)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared);

void BM_Kde(benchmark::State& state) {
    Ensemble e;
    NormalSource z(4);
    e.terminal_values.resize(static_cast<std::size_t>(state.range(0)));
    for (auto& v : e.terminal_values) v = z();
    e.n_paths = e.terminal_values.size();
    for (auto _ : state) benchmark::DoNotOptimize(kde(e));
}
BENCHMARK(BM_Kde)->Arg(10000)->Arg(100000);

void BM_ReferenceLaw(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(reference_singly_perturbed(0.5, 1.0));
}
BENCHMARK(BM_ReferenceLaw)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
