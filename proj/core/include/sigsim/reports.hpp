#pragma once

#include "sigsim/perf.hpp"
#include "sigsim/portfolio.hpp"
#include "sigsim/scenario_grid.hpp"
#include "sigsim/stats.hpp"

#include <optional>
#include <span>
#include <string>

namespace sigsim::reports {

// Every artifact starts with "# sigsim <kind> config_hash=<hex>" plus a
// units note; numbers are formatted with %.10g so identical runs emit
// identical bytes.

std::string scenario_dump(std::span<const ScenarioResult> results, const std::string& config_hash);

std::string optimal_config_csv(std::span<const OptimalConfig> configs, const std::string& config_hash);
std::vector<OptimalConfig> load_optimal_configs(const std::string& path);

std::string accuracy_table_csv(const AccuracyTable& table, const std::string& config_hash);

std::string pvalue_summary_csv(std::span<const PvalueSummaryRow> rows, const std::string& config_hash);

std::string ci_plot_csv(std::span<const CiPlotRow> rows, const std::string& config_hash);

// date,daily_return,cum_pnl,hwm,drawdown[,rolling_sharpe][,rolling_corr]
std::string timeseries_csv(const PnlSeries& pnl, std::span<const std::optional<double>> rolling_sharpe,
                           std::span<const std::optional<double>> rolling_corr, const std::string& config_hash);

// Per-side + combined metric rows for a single instrument backtest.
std::string metrics_report_csv(const TradeAggregates& aggregates, const std::string& config_hash);

std::string turnover_csv(const TurnoverGrid& grid, const std::string& config_hash);

// date,long,short,combined[,levered]
std::string portfolio_stream_csv(const PortfolioRun& run, const std::string& config_hash);

std::string portfolio_report_json(const PortfolioRun& run, const std::string& config_hash);

void write_file(const std::string& path, const std::string& content);

std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

} // namespace sigsim::reports
