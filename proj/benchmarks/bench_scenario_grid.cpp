#include <benchmark/benchmark.h>

#include "sigsim/scenario_grid.hpp"
#include "sigsim/synth.hpp"

#include <vector>

namespace {

using namespace sigsim;

struct GridFixture {
    std::vector<PriceSeries> universe;
    SignalSet signals;

    GridFixture(int n_tickers, int n_sessions) {
        std::vector<SignalRecord> records;
        for (int t = 0; t < n_tickers; ++t) {
            const std::string ticker = "G" + std::to_string(t);
            universe.push_back(random_prices(ticker, Date::parse("2021-01-04"), n_sessions,
                                             {.seed = 40 + (uint64_t)t}));
            TradingCalendar cal = [&] {
                std::vector<Date> dates;
                for (const auto& b : universe.back().bars()) dates.push_back(b.date);
                return TradingCalendar(dates);
            }();
            GeneratorSpec spec;
            spec.seed = 70 + static_cast<uint64_t>(t);
            spec.horizons = {1, 2};
            const auto generated = random_signals(universe.back(), cal, universe.back().first_date(),
                                                  universe.back().last_date(), spec);
            records.insert(records.end(), generated.begin(), generated.end());
        }
        signals = SignalSet(std::move(records));
    }
};

// Full default grid on one ticker across both sides, the unit of work one
// shard processes per horizon pair.
void bm_default_grid_one_ticker(benchmark::State& state) {
    static const GridFixture fx(1, 260);
    const GridSpec grid = default_grid();
    const DirectionPolicy sides[] = {DirectionPolicy::LongOnly, DirectionPolicy::ShortOnly};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_grid(fx.universe[0], fx.signals.for_ticker(fx.universe[0].ticker()), grid, sides, {}));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 2 * 2 *
                            static_cast<int64_t>(grid.size()));
}
BENCHMARK(bm_default_grid_one_ticker)->Unit(benchmark::kMillisecond);

void bm_grid_universe_workers(benchmark::State& state) {
    static const GridFixture fx(8, 160);
    GridSpec grid;
    grid.mhp_values = {1, 3, 5};
    grid.pt_values = {0.005, 0.01, 0.015};
    grid.sl_values = {-0.03, -0.02};
    const DirectionPolicy sides[] = {DirectionPolicy::LongOnly, DirectionPolicy::ShortOnly};
    GridOptions options;
    options.workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_grid_universe(fx.universe, fx.signals, grid, sides, options));
    }
}
BENCHMARK(bm_grid_universe_workers)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace
