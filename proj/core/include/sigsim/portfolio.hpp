#pragma once

#include "sigsim/perf.hpp"
#include "sigsim/scenario_grid.hpp"
#include "sigsim/signals.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigsim {

// One walk-forward step: six consecutive calibration quarters followed by
// the traded quarter.
struct RebalanceStep {
    Quarter calibration_first;
    Quarter calibration_last;
    Quarter trading;

    Date calibration_start() const { return calibration_first.first_day(); }
    Date calibration_end() const { return calibration_last.last_day(); }
    Date trading_start() const { return trading.first_day(); }
    Date trading_end() const { return trading.last_day(); }
};

struct RebalanceSchedule {
    std::vector<RebalanceStep> steps;
};

// Steps advance one quarter at a time; the first step calibrates on the
// first `calibration_quarters` quarters and trades the next. Quarters are
// clipped to the calendar span. Throws ComputeError on insufficient span.
RebalanceSchedule build_schedule(const TradingCalendar& calendar, Quarter start, Quarter end,
                                 int calibration_quarters = 6);

enum class RankMetric { Sharpe, Mdd, FinalCumReturn, Sortino, Beta, DownsideRisk, Accuracy };

const char* to_string(RankMetric m);
RankMetric rank_metric_from_string(const std::string& name);
bool default_ascending(RankMetric m); // true when lower is better

// Per-ticker calibration-window metrics feeding stock selection.
struct CalibrationRecord {
    std::string ticker;
    DirectionPolicy side = DirectionPolicy::LongOnly; // configured trading side
    std::optional<double> sharpe;
    double mdd_pct = 0.0;
    double final_cum_return_pct = 0.0;
    std::optional<double> sortino;
    double downside_risk = 0.0;
    std::optional<double> accuracy_pct; // at the optimal (side, horizon), h = mhp
    std::optional<double> beta;         // stock vs benchmark, window-restricted
    long n_observations = 0;
};

struct PortfolioSimOptions {
    Tiebreak tiebreak = Tiebreak::StopFirst;
    OverlapPolicy overlap = OverlapPolicy::SinglePosition;
    double deadband_pct = 0.0;
    bool include_truncated_in_metrics = false;
    int periods_per_year = 252;
};

// Metrics from simulate_stream over the calibration window only: the price
// series is truncated at window_end, so nothing peeks into the trading
// quarter.
CalibrationRecord calibration_metrics(const PriceSeries& prices, Date window_start, Date window_end,
                                      const OptimalConfig& config, const SignalSet& signals,
                                      const PriceSeries* benchmark, const PortfolioSimOptions& options = {});

struct BetaFilter {
    double bound = 1.0;
    bool exclude_above = true;
};

struct SelectionRule {
    long min_observations = 30;
    std::optional<BetaFilter> beta_filter;
    std::optional<double> min_sharpe; // drop records with sharpe below (or undefined)
    RankMetric rank_metric = RankMetric::Mdd;
    std::optional<bool> ascending; // defaults to the metric's polarity
    int top_n = 20;
};

struct Book {
    std::vector<std::string> tickers; // rank order, best first
};

struct BookSelection {
    Book long_book;
    Book short_book;
    std::vector<std::string> diagnostics;
};

// Filter, rank, and take top_n per side; ties break by ticker symbol.
// Records with an undefined rank metric are excluded. Books smaller than
// top_n are reported, never padded.
BookSelection select_book(std::span<const CalibrationRecord> records, const SelectionRule& rule);

enum class WeightKind { Equal, LinearDecay };

const char* to_string(WeightKind k);
WeightKind weight_kind_from_string(const std::string& name);

// Per-side weights summing to 1. LinearDecay uses w_r proportional to
// (top_n + 1 - r); partial books renormalize.
std::vector<double> book_weights(size_t book_size, int top_n, WeightKind kind);

enum class AccrualMode { WholeRun, PerPosition };

struct LeverageSpec {
    double multiplier = 1.0;
    double annual_cost_pct = 0.0;
    AccrualMode accrual = AccrualMode::WholeRun;
};

// Scale a percent daily stream and charge the daily financing accrual
// (multiplier - 1) * annual_cost / periods on every stream session (or only
// on `active_dates` under per-position accrual).
DailySeries apply_leverage(const DailySeries& stream, const LeverageSpec& spec, int periods_per_year = 252,
                           std::span<const Date> active_dates = {});

enum class CombineMode { Sum, Average };

struct WeightedTrade {
    TradeResult trade;
    double weight = 0.0;
    Quarter quarter;
};

struct StepResult {
    RebalanceStep step;
    Book long_book;
    Book short_book;
    std::vector<double> long_weights;
    std::vector<double> short_weights;
    std::vector<WeightedTrade> trades;
    std::vector<std::string> diagnostics;
};

struct PortfolioOptions {
    SelectionRule rule;
    WeightKind weights = WeightKind::Equal;
    LeverageSpec leverage;
    CombineMode combine = CombineMode::Sum;
    Date regime_split = Date(20089); // 2025-01-01
    PortfolioSimOptions sim;
    int workers = 1;
};

struct PortfolioInputs {
    std::span<const PriceSeries> prices;
    const SignalSet* signals = nullptr;
    std::span<const OptimalConfig> configs;
    const PriceSeries* benchmark = nullptr;
    const TradingCalendar* calendar = nullptr;
};

// Trade one quarter: each watch-list name runs its OptimalConfig over
// signals created inside the quarter whose direction matches the book side.
StepResult run_step(const PortfolioInputs& inputs, const RebalanceStep& step, const BookSelection& books,
                    const PortfolioOptions& options);

struct PortfolioRun {
    RebalanceSchedule schedule;
    std::vector<StepResult> steps;
    DailySeries long_stream;  // weighted, percent per session
    DailySeries short_stream;
    DailySeries combined_stream;
    std::optional<DailySeries> levered_stream;
    RiskSummary long_summary;
    RiskSummary short_summary;
    RiskSummary combined_summary;
    std::optional<RiskSummary> levered_summary;
    std::optional<RiskSummary> before_split;
    std::optional<RiskSummary> after_split;
    Date regime_split;
    std::vector<std::string> diagnostics;
};

PortfolioRun run_walk_forward(const PortfolioInputs& inputs, const RebalanceSchedule& schedule,
                              const PortfolioOptions& options);

struct TurnoverGrid {
    DirectionPolicy side = DirectionPolicy::LongOnly;
    int top_n = 0;
    std::vector<Quarter> quarters;
    std::vector<std::vector<std::string>> cells; // [rank][quarter], empty when the book ran short
};

TurnoverGrid turnover_grid(const PortfolioRun& run, DirectionPolicy side);

} // namespace sigsim
