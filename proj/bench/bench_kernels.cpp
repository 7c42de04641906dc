// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "qtm/mainterm.hpp"
#include "qtm/moment.hpp"

using namespace qtm;

static void BM_moment_serial(benchmark::State& st) {
    MomentConfig cfg;
    cfg.X = double(st.range(0));
    SmoothWeight F(cfg.X);
    const auto w = MomentWeight::from(F);
    for (auto _ : st) benchmark::DoNotOptimize(third_moment_serial(cfg, w).value);
}
static void BM_moment_parallel(benchmark::State& st) {
    MomentConfig cfg;
    cfg.X = double(st.range(0));
    cfg.workers = int(st.range(1));
    SmoothWeight F(cfg.X);
    const auto w = MomentWeight::from(F);
    for (auto _ : st) benchmark::DoNotOptimize(third_moment_empirical(cfg, w).value);
}
BENCHMARK(BM_moment_serial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moment_parallel)->Args({10000, 1})->Args({10000, 4})->Args({10000, 8})->Unit(benchmark::kMillisecond);

static void BM_triple_afe(benchmark::State& st) {
    const ShiftTriple s{0.05, -0.02, 0.03};
    const bool par = st.range(0) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(triple_product_afe_detail(1001, s, AFEWeightG::one(), par).value);
}
BENCHMARK(BM_triple_afe)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_a_factor(benchmark::State& st) {
    const auto plan = ArithFactorPlan::make(15, 4, 100000);
    const ShiftTriple s{0.02, -0.03, 0.05};
    const bool par = st.range(0) != 0;
    for (auto _ : st)
        benchmark::DoNotOptimize(par ? a_factor_product(plan, s).value : a_factor_product_serial(plan, s).value);
}
BENCHMARK(BM_a_factor)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
