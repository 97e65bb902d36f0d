#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "gstein/kernels.hpp"

using namespace gstein::kernels;

namespace {

std::vector<double> noise(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

template <bool Parallel>
void gheatStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto prev = noise(n);
    std::vector<double> next(n);
    const HeatStencil st{1.0, 0.25, 4e-5, 1e4};
    for (auto _ : state) {
        if constexpr (Parallel) {
            omp::gheatStep(prev, next, st);
        } else {
            serial::gheatStep(prev, next, st);
        }
        benchmark::DoNotOptimize(next.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void holder(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto f = noise(n);
    for (auto _ : state) {
        const double v = Parallel ? omp::holderSeminorm(f, 0.01, 0.5, 100) : serial::holderSeminorm(f, 0.01, 0.5, 100);
        benchmark::DoNotOptimize(v);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}

template <bool Parallel>
void latticeStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto next = noise(n + 8);
    std::vector<double> out(n);
    const std::vector<LatticeMeasure> ms{{{-2, 2}, {0.5, 0.5}}, {{-4, 4}, {0.5, 0.5}}};
    for (auto _ : state) {
        if constexpr (Parallel) {
            omp::latticeStep(next, -4, out, 0, ms);
        } else {
            serial::latticeStep(next, -4, out, 0, ms);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void gridStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto next = noise(n);
    std::vector<double> out(n, 0.0);
    const UniformGrid g{-1.0, 2.0 / static_cast<double>(n - 1), n};
    const std::vector<ShiftMeasure> ms{{{-0.013, 0.013}, {0.5, 0.5}}, {{-0.02, 0.05}, {0.7, 0.3}}};
    for (auto _ : state) {
        if constexpr (Parallel) {
            omp::gridStep(next, g, out, 0, n, ms);
        } else {
            serial::gridStep(next, g, out, 0, n, ms);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(gheatStep<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(gheatStep<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(holder<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 16);
BENCHMARK(holder<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 16);
BENCHMARK(latticeStep<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(latticeStep<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(gridStep<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(gridStep<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);

BENCHMARK_MAIN();
