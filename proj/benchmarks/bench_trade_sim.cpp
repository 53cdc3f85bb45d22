#include <benchmark/benchmark.h>

#include "sigsim/synth.hpp"
#include "sigsim/trade_sim.hpp"

#include <vector>

namespace {

using namespace sigsim;

const PriceSeries& bench_series() {
    static const PriceSeries series = random_prices("BM", Date::parse("2020-01-02"), 1000, {.seed = 1});
    return series;
}

void bm_simulate_trade(benchmark::State& state) {
    const PriceSeries& series = bench_series();
    const ExecParams params{static_cast<int>(state.range(0)), 0.01, -0.02};
    size_t i = 0;
    for (auto _ : state) {
        const Date day = series.bar(i % (series.size() - 12)).date;
        benchmark::DoNotOptimize(simulate_trade(series, day, i % 2 ? 1 : -1, params));
        ++i;
    }
}
BENCHMARK(bm_simulate_trade)->Arg(1)->Arg(5)->Arg(10);

void bm_simulate_stream(benchmark::State& state) {
    const PriceSeries& series = bench_series();
    const TradingCalendar calendar = [] {
        std::vector<Date> dates;
        for (const auto& b : bench_series().bars()) dates.push_back(b.date);
        return TradingCalendar(dates);
    }();
    GeneratorSpec spec;
    spec.seed = 3;
    spec.horizons = {1};
    const auto signals = random_signals(series, calendar, series.first_date(), series.last_date(), spec);
    const ExecParams params{3, 0.01, -0.02};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_stream(series, signals, params));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(signals.size()));
}
BENCHMARK(bm_simulate_stream);

} // namespace
