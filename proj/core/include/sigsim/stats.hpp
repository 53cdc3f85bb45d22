#pragma once

#include "sigsim/market_data.hpp"
#include "sigsim/signals.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigsim {

// Standard normal CDF and quantile. The quantile uses Acklam's rational
// approximation refined with one Halley step; accurate to ~1e-15.
double normal_cdf(double z);
double normal_quantile(double p); // 0 < p < 1

// Proportion z-test against a baseline plus the Wald interval around the
// observed proportion.
struct StatTest {
    double p_hat = 0.0;
    long n = 0;
    double p0 = 0.5;
    double se0 = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    double ci_lower = 0.0;
    double ci_upper = 1.0;
};

// z = (p_hat - p0) / sqrt(p0 (1-p0) / n); two-sided by default. Undefined
// (nullopt) when n = 0.
std::optional<StatTest> ztest_vs_baseline(double p_hat, long n, double p0 = 0.5, bool two_sided = true,
                                          double ci_level = 0.95);

struct WaldInterval {
    double lower = 0.0;
    double upper = 1.0;
};

// p_hat -/+ z_{alpha/2} * sqrt(p_hat (1-p_hat) / n), clamped to [0, 1].
std::optional<WaldInterval> wald_ci(double p_hat, long n, double level = 0.95);

struct AccuracyCount {
    double accuracy_pct = 0.0;
    long n = 0;
    long hits = 0;
};

// Share of `side` signals whose realized holding-period return sign matches
// the side. A realized return of exactly zero is a miss for both sides.
// Signals without enough history to evaluate are excluded from n. Undefined
// when no signal of the side is evaluable.
std::optional<AccuracyCount> directional_accuracy(std::span<const SignalRecord> signals, const PriceSeries& prices,
                                                  Direction side, int h, double deadband_pct = 0.0);

inline constexpr int kHoldingPeriods = 11; // h = 0..10

struct AccuracyRow {
    std::string ticker;
    std::array<std::optional<double>, kHoldingPeriods> long_acc_pct;
    std::array<std::optional<double>, kHoldingPeriods> short_acc_pct;
    std::optional<double> avg_long, max_long, min_long;
    std::optional<double> avg_short, max_short, min_short;
    double pct_long = 0.0;  // share of all signals that are long
    double pct_short = 0.0; // share of all signals that are short
    std::optional<int> best_day_long;  // smallest h attaining max_long
    std::optional<int> best_day_short;
    long n_long = 0;
    long n_short = 0;
    // Per-side tests at each side's best holding period; `test` is the one
    // at the ticker's configured strategy side (its best signal period and
    // holding period).
    std::optional<StatTest> long_test;
    std::optional<StatTest> short_test;
    std::optional<StatTest> test;
    Direction test_side = Direction::Flat;
    int test_h = 0;
    std::optional<int> test_horizon; // period signal the test was filtered to
};

struct PvalueSummaryRow {
    std::string label;
    long n = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0; // sample
    double min = 0.0;
    double max = 0.0;
    double pct_below_1 = 0.0;
    double pct_below_5 = 0.0;
    double pct_below_10 = 0.0;
};

// Descriptive statistics of a p-value collection; undefined on empty input.
std::optional<PvalueSummaryRow> pvalue_summary(std::span<const double> p_values, std::string label);

struct AccuracyTableOptions {
    double deadband_pct = 0.0;
    double ci_level = 0.95;
    bool two_sided = true;
    double baseline_p0 = 0.5;
};

class OptimalConfigLookup; // fwd: scenario_grid.hpp

// One row per ticker carrying all holding-period accuracies plus the
// significance test at the optimal (side, horizon) when a config is given.
// Tickers with no signals are skipped and reported in `omitted`.
struct AccuracyTable {
    std::vector<AccuracyRow> rows;
    std::vector<std::string> omitted;
};

struct TickerStrategy {
    Direction side = Direction::Long;
    std::optional<int> period_signal; // filter signals to this horizon
};

AccuracyTable accuracy_table(std::span<const PriceSeries> universe, const SignalSet& signals,
                             const std::vector<std::pair<std::string, TickerStrategy>>& strategies,
                             const AccuracyTableOptions& options = {});

struct CiPlotRow {
    int rank = 0;
    std::string ticker;
    double accuracy_pct = 0.0;
    double ci_lower_pct = 0.0;
    double ci_upper_pct = 0.0;
    long n = 0;
};

// Rows ordered lowest to highest accuracy at the side's best day; ties by
// ticker symbol.
std::vector<CiPlotRow> ci_plot_data(std::span<const AccuracyRow> rows, Direction side, double level = 0.95);

} // namespace sigsim
