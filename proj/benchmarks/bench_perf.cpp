#include <benchmark/benchmark.h>

#include "sigsim/perf.hpp"
#include "sigsim/rng.hpp"

#include <vector>

namespace {

using namespace sigsim;

std::vector<double> returns(size_t n) {
    Rng rng(5);
    std::vector<double> out(n);
    for (auto& v : out) v = rng.uniform(-1.0, 1.0);
    return out;
}

std::vector<Date> dates(size_t n) {
    std::vector<Date> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(Date(20000 + static_cast<int>(i)));
    return out;
}

void bm_cum_pnl(benchmark::State& state) {
    const auto daily = returns(static_cast<size_t>(state.range(0)));
    const auto axis = dates(daily.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(cum_pnl(axis, daily));
    }
}
BENCHMARK(bm_cum_pnl)->Arg(252)->Arg(2520);

void bm_ann_sharpe(benchmark::State& state) {
    const auto daily = returns(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ann_sharpe(daily));
    }
}
BENCHMARK(bm_ann_sharpe)->Arg(252)->Arg(2520);

void bm_rolling_corr(benchmark::State& state) {
    const auto a = returns(2520);
    const auto b = returns(2520);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rolling_corr(a, b, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(bm_rolling_corr)->Arg(60)->Arg(90);

} // namespace

BENCHMARK_MAIN();
