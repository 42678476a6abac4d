// Serial reference against the OpenMP kernels.

#include "singdeg/dyson.hpp"
#include "singdeg/montecarlo.hpp"

#include <benchmark/benchmark.h>

using namespace singdeg;

namespace {

VarianceProfile antiTriangle(Index k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j + i < k; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    return VarianceProfile(m);
}

EnsembleConfig sweepConfig(benchmark::State& state) {
    return {antiTriangle(2), {16, 32, static_cast<Index>(state.range(0))}, 20, 7};
}

std::vector<double> tauGrid(Index points) {
    std::vector<double> tau(points);
    for (Index i = 0; i < points; ++i) tau[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    return tau;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto cfg = sweepConfig(state);
    for (auto _ : state) benchmark::DoNotOptimize(runSweepSerial(cfg).fittedSlope);
}

void BM_SweepParallel(benchmark::State& state) {
    const auto cfg = sweepConfig(state);
    for (auto _ : state) benchmark::DoNotOptimize(runSweep(cfg).fittedSlope);
}

void BM_DensitySerial(benchmark::State& state) {
    const auto S = antiTriangle(3);
    const auto tau = tauGrid(static_cast<Index>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(densityProfileSerial(S, tau, 1e-6).rho.data());
}

void BM_DensityParallel(benchmark::State& state) {
    const auto S = antiTriangle(3);
    const auto tau = tauGrid(static_cast<Index>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(densityProfile(S, tau, 1e-6).rho.data());
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensitySerial)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityParallel)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
