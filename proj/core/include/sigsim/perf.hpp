#pragma once

#include "sigsim/dates.hpp"
#include "sigsim/trade_sim.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sigsim {

// Non-compounded PnL curve. daily_return_pct is percent of a fixed notional
// per session; cum_pnl is its running sum, hwm its running maximum, drawdown
// their difference (all in percentage points).
struct PnlSeries {
    std::vector<Date> dates;
    std::vector<double> daily_return_pct;
    std::vector<double> cum_pnl;
    std::vector<double> hwm;
    std::vector<double> drawdown;
};

PnlSeries cum_pnl(std::vector<Date> dates, std::vector<double> daily_return_pct);

double max_drawdown(const PnlSeries& series);

// Annualized Sharpe on a daily series; sample stddev; undefined on zero
// variance or fewer than two observations. rf_annual_pct is in the same
// percent units as the daily returns.
std::optional<double> ann_sharpe(std::span<const double> daily_return_pct, double rf_annual_pct = 0.0,
                                 int periods_per_year = 252);

// Trailing-window annualized Sharpe; entries before the window fills are
// undefined.
std::vector<std::optional<double>> rolling_sharpe(std::span<const double> daily_return_pct, int window,
                                                  double rf_annual_pct = 0.0, int periods_per_year = 252);

// Trailing-window Pearson correlation of two aligned series.
std::vector<std::optional<double>> rolling_corr(std::span<const double> a, std::span<const double> b,
                                                int window = 90);

std::optional<double> correlation(std::span<const double> a, std::span<const double> b);

// cov(stock, benchmark) / var(benchmark), sample statistics.
std::optional<double> beta(std::span<const double> stock_daily, std::span<const double> benchmark_daily);

struct SortinoResult {
    std::optional<double> sortino;
    double downside_deviation = 0.0;
};

// Downside deviation sqrt(mean(min(r - target, 0)^2)); Sortino is the
// annualized mean excess over it, undefined when nothing falls below target.
SortinoResult sortino_and_downside(std::span<const double> daily_return_pct, double target = 0.0,
                                   int periods_per_year = 252);

struct RiskSummary {
    double final_cum_return_pct = 0.0;
    double peak_cum_return_pct = 0.0;
    double mdd_pct = 0.0;
    std::optional<double> ann_sharpe;
    std::optional<double> correlation_to_benchmark;
    long n_trades = 0;
    std::optional<double> win_rate_pct;
    std::optional<double> mean_holding;
    int max_holding = 0;
};

struct TradeAggregateRow {
    long n_trades = 0;
    double cum_return_pct = 0.0;
    std::optional<double> sharpe;
    double mdd_pct = 0.0;
    std::optional<double> mean_holding;
    int max_holding = 0;
    std::optional<double> win_rate_pct; // strictly positive returns
};

struct TradeAggregates {
    TradeAggregateRow long_side;
    TradeAggregateRow short_side;
    TradeAggregateRow combined;
};

// Per-side and combined trade-level statistics; PnL-based metrics use
// exit-date attribution over `sessions` (zero on sessions with no exits).
TradeAggregates trade_aggregates(std::span<const TradeResult> trades, std::span<const Date> sessions);

// Sparse daily stream keyed by session date; the workhorse for combining
// portfolio legs and steps.
struct DailySeries {
    std::vector<Date> dates;   // sorted, unique
    std::vector<double> values;

    double final_sum() const;
};

DailySeries add(const DailySeries& a, const DailySeries& b);
DailySeries scale(const DailySeries& s, double factor);
PnlSeries to_pnl(const DailySeries& s);

} // namespace sigsim
