#include <benchmark/benchmark.h>

#include "totcorr/measures.hpp"

using namespace totcorr;

static void BM_PartialTraceDensity(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto rho = random_density(RegisterShape::qubits(n), 4, 1);
    const int keep[] = {0, n - 1};
    for (auto _ : state) benchmark::DoNotOptimize(partial_trace(rho, keep));
}
BENCHMARK(BM_PartialTraceDensity)->DenseRange(4, 10, 2);

// Pure marginals never build the D x D matrix.
static void BM_PureMarginal(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto psi = random_pure(RegisterShape::qubits(n), 1);
    const int keep[] = {0, n / 2};
    for (auto _ : state) benchmark::DoNotOptimize(marginal(psi, keep));
}
BENCHMARK(BM_PureMarginal)->DenseRange(8, 20, 4);

static void BM_MeasureReport(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto psi = random_pure(RegisterShape::qubits(n), 2);
    for (auto _ : state) benchmark::DoNotOptimize(measure_report(psi));
}
BENCHMARK(BM_MeasureReport)->DenseRange(4, 12, 4)->Unit(benchmark::kMillisecond);

static void BM_MeasureSMixed(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto rho = random_density(RegisterShape::qubits(n), 1 << n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(measure_S(rho));
}
BENCHMARK(BM_MeasureSMixed)->DenseRange(3, 7, 2)->Unit(benchmark::kMillisecond);

static void BM_SubsetCorrelationSum(benchmark::State& state) {
    const auto psi = random_pure(RegisterShape::qubits(static_cast<int>(state.range(0))), 4);
    for (auto _ : state) benchmark::DoNotOptimize(subset_correlation_sum(psi));
}
BENCHMARK(BM_SubsetCorrelationSum)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
