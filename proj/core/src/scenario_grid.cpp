#include "sigsim/scenario_grid.hpp"

#include "sigsim/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

namespace sigsim {

void GridSpec::validate() const {
    auto check_sorted_unique = [](const auto& values, const char* axis) {
        if (values.empty()) throw ComputeError(std::string("grid axis ") + axis + " is empty");
        for (size_t i = 0; i + 1 < values.size(); ++i)
            if (!(values[i] < values[i + 1]))
                throw ComputeError(std::string("grid axis ") + axis + " not sorted/unique");
    };
    check_sorted_unique(mhp_values, "mhp");
    check_sorted_unique(pt_values, "pt");
    check_sorted_unique(sl_values, "sl");
    for (int m : mhp_values)
        if (m < 1) throw ComputeError("mhp grid values must be >= 1");
    for (double p : pt_values)
        if (!(p > 0.0)) throw ComputeError("pt grid values must be > 0");
    for (double s : sl_values)
        if (!(s < 0.0)) throw ComputeError("sl grid values must be < 0");
}

GridSpec default_grid(bool include_upper_endpoints) {
    GridSpec grid;
    for (int m = 1; m <= 10; ++m) grid.mhp_values.push_back(m);
    // Integer numerators over 1e4 keep the axis values exact.
    const int pt_last = include_upper_endpoints ? 200 : 195;
    for (int n = 10; n <= pt_last; n += 5) grid.pt_values.push_back(n / 1e4);
    const int sl_last = include_upper_endpoints ? -100 : -150;
    for (int n = -400; n <= sl_last; n += 50) grid.sl_values.push_back(n / 1e4);
    return grid;
}

namespace {

int side_rank(DirectionPolicy side) {
    switch (side) {
        case DirectionPolicy::LongOnly: return 0;
        case DirectionPolicy::ShortOnly: return 1;
        case DirectionPolicy::Both: return 2;
    }
    return 3;
}

// Signal admitted to one (ticker, horizon, side) stream: entry bar index
// plus direction, sorted by creation then entry.
struct AdmittedSignal {
    Date created;
    size_t entry_index;
    int direction;
};

// Evaluate every grid point for one admitted-signal stream. Reuses the
// caller's daily buffer; semantics match simulate_stream exactly.
void evaluate_grid_points(const PriceSeries& series, const std::vector<AdmittedSignal>& admitted,
                          const GridSpec& grid, const GridOptions& options, const std::string& ticker, int horizon,
                          DirectionPolicy side, std::vector<double>& daily_buf,
                          std::vector<ScenarioResult>& out) {
    const auto bars = series.bars();
    const size_t n_sessions = bars.size();

    for (int mhp : grid.mhp_values) {
        for (double pt : grid.pt_values) {
            for (double sl : grid.sl_values) {
                const ExecParams params{mhp, pt, sl};
                std::fill(daily_buf.begin(), daily_buf.end(), 0.0);

                long n_trades = 0;
                long wins = 0;
                double cum = 0.0;
                Date open_until(std::numeric_limits<int>::min());
                bool has_open = false;

                for (const AdmittedSignal& sig : admitted) {
                    if (options.overlap == OverlapPolicy::SinglePosition && has_open && sig.created < open_until)
                        continue;
                    const TradeScan scan = scan_trade(bars, sig.entry_index, sig.direction, params, options.tiebreak);
                    if (options.overlap == OverlapPolicy::SinglePosition) {
                        has_open = true;
                        open_until = bars[scan.exit_index].date;
                    }
                    if (scan.reason == ExitReason::Truncated && !options.include_truncated) continue;
                    ++n_trades;
                    if (scan.trade_return > 0.0) ++wins;
                    cum += scan.trade_return * 100.0;
                    daily_buf[scan.exit_index] += scan.trade_return * 100.0;
                }

                ScenarioResult result;
                result.ticker = ticker;
                result.horizon = horizon;
                result.side = side;
                result.params = params;
                result.cum_return_pct = cum;
                result.n_trades = n_trades;
                if (n_trades > 0)
                    result.win_rate_pct = 100.0 * static_cast<double>(wins) / static_cast<double>(n_trades);

                // Single pass for drawdown; two-pass moments for the Sharpe.
                double running = 0.0, peak = 0.0, worst = 0.0, sum = 0.0;
                bool all_equal = true;
                for (size_t i = 0; i < n_sessions; ++i) {
                    running += daily_buf[i];
                    if (i == 0 || running > peak) peak = running;
                    worst = std::max(worst, peak - running);
                    sum += daily_buf[i];
                    all_equal = all_equal && daily_buf[i] == daily_buf[0];
                }
                result.mdd_pct = worst;
                if (n_sessions >= 2 && !all_equal) {
                    const double mean = sum / static_cast<double>(n_sessions);
                    double ss = 0.0;
                    for (size_t i = 0; i < n_sessions; ++i) {
                        const double d = daily_buf[i] - mean;
                        ss += d * d;
                    }
                    const double stddev = std::sqrt(ss / static_cast<double>(n_sessions - 1));
                    if (stddev > 0.0)
                        result.sharpe = mean / stddev * std::sqrt(static_cast<double>(options.periods_per_year));
                }
                out.push_back(std::move(result));
            }
        }
    }
}

} // namespace

std::vector<ScenarioResult> run_grid(const PriceSeries& series, std::span<const SignalRecord> signals,
                                     const GridSpec& grid, std::span<const DirectionPolicy> sides,
                                     const GridOptions& options) {
    grid.validate();
    std::vector<ScenarioResult> out;

    std::vector<int> horizons;
    for (const auto& s : signals)
        if (std::find(horizons.begin(), horizons.end(), s.horizon) == horizons.end()) horizons.push_back(s.horizon);
    std::sort(horizons.begin(), horizons.end());

    std::vector<double> daily_buf(series.size(), 0.0);

    for (int horizon : horizons) {
        // Creation-ordered signal views per side, entry resolved once.
        for (DirectionPolicy side : sides) {
            std::vector<AdmittedSignal> admitted;
            for (const auto& s : signals) {
                if (s.horizon != horizon) continue;
                const Direction dir = direction_of(s.forecast_return_pct, options.deadband_pct);
                if (dir == Direction::Flat) continue;
                if (side == DirectionPolicy::LongOnly && dir != Direction::Long) continue;
                if (side == DirectionPolicy::ShortOnly && dir != Direction::Short) continue;
                const auto entry = series.first_index_after(s.created_at.date);
                if (!entry) continue;
                admitted.push_back({s.created_at.date, *entry, direction_value(dir)});
            }
            std::stable_sort(admitted.begin(), admitted.end(),
                             [](const AdmittedSignal& a, const AdmittedSignal& b) { return a.created < b.created; });
            evaluate_grid_points(series, admitted, grid, options, series.ticker(), horizon, side, daily_buf, out);
        }
    }
    return out;
}

std::vector<ScenarioResult> run_grid_universe(std::span<const PriceSeries> universe, const SignalSet& signals,
                                              const GridSpec& grid, std::span<const DirectionPolicy> sides,
                                              const GridOptions& options) {
    grid.validate();
    const size_t n = universe.size();
    std::vector<std::vector<ScenarioResult>> shards(n);

    const int workers = std::max(1, options.workers);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            const PriceSeries& series = universe[i];
            shards[i] = run_grid(series, signals.for_ticker(series.ticker()), grid, sides, options);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Merge in ticker order, then enforce the canonical sort.
    std::vector<ScenarioResult> out;
    size_t total = 0;
    for (const auto& shard : shards) total += shard.size();
    out.reserve(total);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return universe[a].ticker() < universe[b].ticker(); });
    for (size_t i : order)
        for (auto& r : shards[i]) out.push_back(std::move(r));

    std::sort(out.begin(), out.end(), [](const ScenarioResult& a, const ScenarioResult& b) {
        return std::tie(a.ticker, a.horizon) < std::tie(b.ticker, b.horizon) ||
               (std::tie(a.ticker, a.horizon) == std::tie(b.ticker, b.horizon) &&
                std::make_tuple(side_rank(a.side), a.params.mhp, a.params.pt, a.params.sl) <
                    std::make_tuple(side_rank(b.side), b.params.mhp, b.params.pt, b.params.sl));
    });
    return out;
}

const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::MaxSharpe: return "max_sharpe";
        case Criterion::MinMdd: return "min_mdd";
        case Criterion::MaxCumReturn: return "max_cum_return";
    }
    return "?";
}

Criterion criterion_from_string(const std::string& name) {
    if (name == "max_sharpe") return Criterion::MaxSharpe;
    if (name == "min_mdd") return Criterion::MinMdd;
    if (name == "max_cum_return") return Criterion::MaxCumReturn;
    throw InputError("unknown criterion '" + name + "'");
}

namespace {

// +1 when a beats b on the criterion, -1 when b beats a, 0 on a tie. An
// undefined Sharpe loses to any defined one.
int compare_criterion(const ScenarioResult& a, const ScenarioResult& b, Criterion criterion) {
    switch (criterion) {
        case Criterion::MaxSharpe: {
            if (a.sharpe && b.sharpe) {
                if (*a.sharpe != *b.sharpe) return *a.sharpe > *b.sharpe ? 1 : -1;
                return 0;
            }
            if (a.sharpe) return 1;
            if (b.sharpe) return -1;
            return 0;
        }
        case Criterion::MinMdd:
            if (a.mdd_pct != b.mdd_pct) return a.mdd_pct < b.mdd_pct ? 1 : -1;
            return 0;
        case Criterion::MaxCumReturn:
            if (a.cum_return_pct != b.cum_return_pct) return a.cum_return_pct > b.cum_return_pct ? 1 : -1;
            return 0;
    }
    return 0;
}

bool better_scenario(const ScenarioResult& a, const ScenarioResult& b, Criterion criterion) {
    const int cmp = compare_criterion(a, b, criterion);
    if (cmp != 0) return cmp > 0;
    if (a.mdd_pct != b.mdd_pct) return a.mdd_pct < b.mdd_pct;
    if (a.cum_return_pct != b.cum_return_pct) return a.cum_return_pct > b.cum_return_pct;
    if (a.params.mhp != b.params.mhp) return a.params.mhp < b.params.mhp;
    if (a.params.pt != b.params.pt) return a.params.pt > b.params.pt;
    if (a.params.sl != b.params.sl) return a.params.sl > b.params.sl;
    if (a.horizon != b.horizon) return a.horizon < b.horizon;
    return side_rank(a.side) < side_rank(b.side);
}

} // namespace

OptimalConfig select_optimal(std::span<const ScenarioResult> results, Criterion criterion, long min_trades,
                             Date window_start, Date window_end) {
    const ScenarioResult* best = nullptr;
    for (const auto& r : results) {
        if (r.n_trades < min_trades) continue;
        if (!best || better_scenario(r, *best, criterion)) best = &r;
    }
    if (!best)
        throw ComputeError("no scenario with at least " + std::to_string(min_trades) + " trades among " +
                           std::to_string(results.size()) + " candidates");
    OptimalConfig config;
    config.ticker = best->ticker;
    config.strategy = best->side;
    config.period_signal = best->horizon;
    config.params = best->params;
    config.window_start = window_start;
    config.window_end = window_end;
    return config;
}

OptimalSelection select_optimal_per_ticker(std::span<const ScenarioResult> results, Criterion criterion,
                                           long min_trades, Date window_start, Date window_end) {
    OptimalSelection selection;
    size_t begin = 0;
    while (begin < results.size()) {
        size_t end = begin;
        while (end < results.size() && results[end].ticker == results[begin].ticker) ++end;
        try {
            selection.configs.push_back(
                select_optimal(results.subspan(begin, end - begin), criterion, min_trades, window_start, window_end));
        } catch (const ComputeError& e) {
            selection.diagnostics.push_back(results[begin].ticker + ": " + e.what());
        }
        begin = end;
    }
    std::sort(selection.configs.begin(), selection.configs.end(),
              [](const OptimalConfig& a, const OptimalConfig& b) { return a.ticker < b.ticker; });
    return selection;
}

const char* side_name(DirectionPolicy side) {
    switch (side) {
        case DirectionPolicy::LongOnly: return "long";
        case DirectionPolicy::ShortOnly: return "short";
        case DirectionPolicy::Both: return "both";
    }
    return "?";
}

const char* strategy_name(DirectionPolicy strategy) {
    switch (strategy) {
        case DirectionPolicy::LongOnly: return "long_only";
        case DirectionPolicy::ShortOnly: return "short_only";
        case DirectionPolicy::Both: return "both";
    }
    return "?";
}

DirectionPolicy side_from_string(const std::string& name) {
    if (name == "long" || name == "long_only") return DirectionPolicy::LongOnly;
    if (name == "short" || name == "short_only") return DirectionPolicy::ShortOnly;
    if (name == "both") return DirectionPolicy::Both;
    throw InputError("unknown side '" + name + "'");
}

} // namespace sigsim
