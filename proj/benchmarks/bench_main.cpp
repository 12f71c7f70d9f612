#include <benchmark/benchmark.h>

#include "conelab/cone.hpp"
#include "conelab/riccati.hpp"
#include "conelab/spectrum.hpp"

using namespace conelab;

static void BM_hyp2f1_series(benchmark::State& st) {
    const HypParams p(3.5, -0.5, 1.5);
    for (auto _ : st) benchmark::DoNotOptimize(hyp2f1(p, 0.3).value);
}
BENCHMARK(BM_hyp2f1_series);

static void BM_hyp2f1_near_one(benchmark::State& st) {
    const HypParams p(49.5, -0.5, 19.5);
    for (auto _ : st) benchmark::DoNotOptimize(hyp2f1(p, 0.9).value);
}
BENCHMARK(BM_hyp2f1_near_one);

static void BM_hyp2f1_large_params(benchmark::State& st) {
    const HypParams p(999.5, -0.5, 937.5);
    for (auto _ : st) benchmark::DoNotOptimize(hyp2f1(p, 0.97).value);
}
BENCHMARK(BM_hyp2f1_large_params);

static void BM_find_root(benchmark::State& st) {
    const ConeParams p(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(find_root(p).t_nk);
}
BENCHMARK(BM_find_root)->Args({7, 1})->Args({12, 6})->Args({200, 100});

static void BM_find_eigenvalue(benchmark::State& st) {
    const ConeParams p(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const auto root = find_root(p);
    for (auto _ : st) benchmark::DoNotOptimize(find_eigenvalue(p, root, Mode{}, 0).lambda);
}
BENCHMARK(BM_find_eigenvalue)->Args({7, 1})->Args({12, 6})->Args({20, 18})->Unit(benchmark::kMillisecond);

static void BM_verify_barrier(benchmark::State& st) {
    const ConeParams p(200, 188);
    for (auto _ : st) benchmark::DoNotOptimize(verify_barrier(p).passed);
}
BENCHMARK(BM_verify_barrier)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
