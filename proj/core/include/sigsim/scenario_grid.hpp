#pragma once

#include "sigsim/perf.hpp"
#include "sigsim/trade_sim.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigsim {

// PT/SL/MHP search space. Axes are sorted and duplicate-free; cardinality is
// the product of the axis lengths.
struct GridSpec {
    std::vector<int> mhp_values;
    std::vector<double> pt_values;
    std::vector<double> sl_values;

    size_t size() const { return mhp_values.size() * pt_values.size() * sl_values.size(); }
    void validate() const;
};

// MHP 1..10, PT from 0.001 step 0.0005, SL from -0.04 step 0.005. The upper
// endpoints (0.02 and -0.01) are excluded by default, giving 10 x 38 x 6 =
// 2,280 points; pass include_upper_endpoints for the 10 x 39 x 7 variant.
GridSpec default_grid(bool include_upper_endpoints = false);

struct ScenarioResult {
    std::string ticker;
    int horizon = 1;
    DirectionPolicy side = DirectionPolicy::LongOnly;
    ExecParams params;
    double cum_return_pct = 0.0;
    std::optional<double> sharpe;
    double mdd_pct = 0.0;
    long n_trades = 0;
    std::optional<double> win_rate_pct;
};

struct GridOptions {
    Tiebreak tiebreak = Tiebreak::StopFirst;
    OverlapPolicy overlap = OverlapPolicy::SinglePosition;
    double deadband_pct = 0.0;
    bool include_truncated = false; // truncated trades still occupy the slot
    int workers = 1;
    int periods_per_year = 252;
};

// Every (horizon, side, grid point) for one ticker, in deterministic order
// (horizon, side, mhp, pt, sl). Horizons are those present in `signals`.
std::vector<ScenarioResult> run_grid(const PriceSeries& series, std::span<const SignalRecord> signals,
                                     const GridSpec& grid, std::span<const DirectionPolicy> sides,
                                     const GridOptions& options = {});

// Universe run sharded by ticker across options.workers threads. Output is
// sorted by (ticker, horizon, side, mhp, pt, sl) and is byte-identical for
// any worker count.
std::vector<ScenarioResult> run_grid_universe(std::span<const PriceSeries> universe, const SignalSet& signals,
                                              const GridSpec& grid, std::span<const DirectionPolicy> sides,
                                              const GridOptions& options = {});

enum class Criterion { MaxSharpe, MinMdd, MaxCumReturn };

const char* to_string(Criterion c);
Criterion criterion_from_string(const std::string& name);

// Per-ticker execution choice: trading side, signal horizon, exit params.
struct OptimalConfig {
    std::string ticker;
    DirectionPolicy strategy = DirectionPolicy::LongOnly;
    int period_signal = 1;
    ExecParams params;
    Date window_start;
    Date window_end;
};

// Best qualifying scenario (n_trades >= min_trades) under `criterion`. Ties
// break by lower mdd, higher cum_return, smaller mhp, larger pt, larger sl,
// then (horizon, side) for a total order. Throws ComputeError when nothing
// qualifies.
OptimalConfig select_optimal(std::span<const ScenarioResult> results, Criterion criterion, long min_trades,
                             Date window_start, Date window_end);

struct OptimalSelection {
    std::vector<OptimalConfig> configs; // sorted by ticker
    std::vector<std::string> diagnostics;
};

// select_optimal per ticker; tickers with no qualifying scenario are skipped
// with a diagnostic.
OptimalSelection select_optimal_per_ticker(std::span<const ScenarioResult> results, Criterion criterion,
                                           long min_trades, Date window_start, Date window_end);

const char* side_name(DirectionPolicy side);         // long / short / both
const char* strategy_name(DirectionPolicy strategy); // long_only / short_only / both
DirectionPolicy side_from_string(const std::string& name);

} // namespace sigsim
