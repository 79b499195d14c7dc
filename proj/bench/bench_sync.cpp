// Serial-vs-parallel micro-benchmarks for the synchrony kernels.
// Thread count comes from OMP_NUM_THREADS / omp defaults.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "turnsim/rng.hpp"
#include "turnsim/sync/metrics.hpp"

using turnsim::SplitMix;
using turnsim::sync::Exec;
using turnsim::sync::KsgOptions;
using turnsim::sync::RealSeries;
using turnsim::sync::SymbolSequence;

namespace {

SymbolSequence symbols(std::uint64_t seed, std::size_t n, int alphabet) {
    SplitMix rng(seed);
    SymbolSequence x(n);
    for (auto& v : x) {
        v = static_cast<int>(rng.next() % static_cast<std::uint64_t>(alphabet));
    }
    return x;
}

RealSeries reals(std::uint64_t seed, std::size_t n) {
    SplitMix rng(seed);
    RealSeries x(n);
    double level = 0.0;
    for (auto& v : x) {
        level += rng.uniform() - 0.5;
        v = level;
    }
    return x;
}

Exec exec_of(const benchmark::State& state) {
    return state.range(1) == 0 ? Exec::Serial : Exec::Parallel;
}

void BM_DiscreteMi(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SymbolSequence a = symbols(1, n, 6);
    const SymbolSequence b = symbols(2, n, 6);
    const Exec exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            turnsim::sync::discrete_mutual_information(a, b, exec));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}

void BM_Ksg(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RealSeries x = reals(3, n);
    const RealSeries y = reals(4, n);
    KsgOptions options;
    options.exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            turnsim::sync::ksg_mutual_information(x, y, options));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}

void BM_Plv(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RealSeries a = reals(5, n);
    const RealSeries b = reals(6, n);
    const Exec exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(turnsim::sync::phase_locking_value(a, b, exec));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}

}  // namespace

// Second argument: 0 = serial reference, 1 = OpenMP kernel.
BENCHMARK(BM_DiscreteMi)
    ->ArgsProduct({{1 << 14, 1 << 17}, {0, 1}})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Ksg)
    ->ArgsProduct({{1000, 4000}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Plv)
    ->ArgsProduct({{1 << 12, 1 << 16}, {0, 1}})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
