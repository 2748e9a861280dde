#include <benchmark/benchmark.h>

#include "totcorr/roof.hpp"

using namespace totcorr;

static void BM_ObjectiveGradient(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int r = 1 << n;
    const auto rho = random_density(RegisterShape::qubits(n), r, 1);
    std::vector<std::vector<int>> singles;
    for (int k = 0; k < r * r; ++k) singles.push_back({k});
    const detail::DecompositionObjective f(rho, MeasureKind::M, singles);
    const Matrix v = detail::random_isometry(r * r, r, 2);
    double value = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(f.gradient(v, &value));
}
BENCHMARK(BM_ObjectiveGradient)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

static void BM_RoofTwoQubit(benchmark::State& state) {
    const auto rho = random_density(RegisterShape::qubits(2), static_cast<int>(state.range(0)), 3);
    RoofConfig cfg;
    cfg.restarts = 1;
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(roof_minimize(rho, MeasureKind::M, cfg).value);
}
BENCHMARK(BM_RoofTwoQubit)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
