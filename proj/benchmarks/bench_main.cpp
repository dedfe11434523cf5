#include "whitham/continuation.hpp"
#include "whitham/evolution.hpp"
#include "whitham/spectral.hpp"
#include "whitham/steady.hpp"

#include <benchmark/benchmark.h>

using namespace whitham;

namespace {

void BM_OperatorMatrix(benchmark::State& state) {
    const CollocationGrid grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(operator_matrix(DispersionModel::whitham(), grid));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OperatorMatrix)->RangeMultiplier(2)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_CosineAnalysis(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> values(n, 0.0);
    const CollocationGrid grid(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = std::cos(grid[i]) + 0.1 * std::cos(3 * grid[i]);
    for (auto _ : state) benchmark::DoNotOptimize(cosine_analysis(values));
}
BENCHMARK(BM_CosineAnalysis)->RangeMultiplier(4)->Range(16, 1024);

void BM_NewtonFixedHeight(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SteadyOperator op(DispersionModel::whitham(), n);
    const auto guess = small_amplitude_guess(DispersionModel::whitham(), 1, 0.05, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(newton_fixed_height(op, guess.values, guess.mu, 0.1, 1, NewtonOptions{}));
    }
}
BENCHMARK(BM_NewtonFixedHeight)->RangeMultiplier(2)->Range(16, 512)->Unit(benchmark::kMillisecond);

void BM_MidpointStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto guess = small_amplitude_guess(DispersionModel::whitham(), 1, 0.05, 32);
    const auto sol = newton_fixed_speed(guess.values, guess.mu, DispersionModel::whitham());
    EvolutionState s = sample_profile(sol.profile, n);
    EvolutionConfig cfg;
    MidpointIntegrator integ(n, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(integ.step(s, cfg.dt));
}
BENCHMARK(BM_MidpointStep)->RangeMultiplier(4)->Range(32, 2048);

void BM_TraceBranch(benchmark::State& state) {
    ContinuationConfig cfg;
    cfg.n_initial = 32;
    cfg.height_max = 0.3;
    cfg.verify_points = false;
    for (auto _ : state) benchmark::DoNotOptimize(trace_branch(DispersionModel::whitham(), cfg));
}
BENCHMARK(BM_TraceBranch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
