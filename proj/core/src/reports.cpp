#include "sigsim/reports.hpp"

#include "sigsim/csv.hpp"
#include "sigsim/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sigsim::reports {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : "nan";
}

namespace {

std::string artifact_header(const std::string& kind, const std::string& config_hash, const std::string& units) {
    std::string header = "# sigsim " + kind + " config_hash=" + config_hash + "\n";
    if (!units.empty()) header += "# units: " + units + "\n";
    return header;
}

} // namespace

std::string scenario_dump(std::span<const ScenarioResult> results, const std::string& config_hash) {
    std::string out = artifact_header("scenarios", config_hash,
                                      "cum_return/mdd/win_rate in percent; pt/sl fractional returns on entry open");
    out += "ticker,horizon,side,mhp,pt,sl,cum_return,sharpe,mdd,n_trades,win_rate\n";
    for (const auto& r : results) {
        out += r.ticker;
        out += ',';
        out += std::to_string(r.horizon);
        out += ',';
        out += side_name(r.side);
        out += ',';
        out += std::to_string(r.params.mhp);
        out += ',';
        out += format_double(r.params.pt);
        out += ',';
        out += format_double(r.params.sl);
        out += ',';
        out += format_double(r.cum_return_pct);
        out += ',';
        out += format_optional(r.sharpe);
        out += ',';
        out += format_double(r.mdd_pct);
        out += ',';
        out += std::to_string(r.n_trades);
        out += ',';
        out += format_optional(r.win_rate_pct);
        out += '\n';
    }
    return out;
}

std::string optimal_config_csv(std::span<const OptimalConfig> configs, const std::string& config_hash) {
    std::string out = artifact_header("optimal_configs", config_hash, "pt/sl fractional returns on entry open");
    out += "ticker,strategy,period_signal,mhp,pt,sl,window_start,window_end\n";
    for (const auto& c : configs) {
        out += c.ticker;
        out += ',';
        out += strategy_name(c.strategy);
        out += ',';
        out += std::to_string(c.period_signal);
        out += ',';
        out += std::to_string(c.params.mhp);
        out += ',';
        out += format_double(c.params.pt);
        out += ',';
        out += format_double(c.params.sl);
        out += ',';
        out += c.window_start.to_string();
        out += ',';
        out += c.window_end.to_string();
        out += '\n';
    }
    return out;
}

std::vector<OptimalConfig> load_optimal_configs(const std::string& path) {
    csv::TableReader reader(path);
    std::vector<OptimalConfig> configs;
    if (reader.header().empty()) return configs;
    const size_t c_ticker = reader.column("ticker");
    const size_t c_strategy = reader.column("strategy");
    const size_t c_period = reader.column("period_signal");
    const size_t c_mhp = reader.column("mhp");
    const size_t c_pt = reader.column("pt");
    const size_t c_sl = reader.column("sl");
    const size_t c_start = reader.column("window_start");
    const size_t c_end = reader.column("window_end");

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const size_t line = reader.line_number();
        OptimalConfig c;
        c.ticker = fields.at(c_ticker);
        c.strategy = side_from_string(fields.at(c_strategy));
        c.period_signal = static_cast<int>(csv::parse_long(fields.at(c_period), "period_signal", line));
        c.params.mhp = static_cast<int>(csv::parse_long(fields.at(c_mhp), "mhp", line));
        c.params.pt = csv::parse_double(fields.at(c_pt), "pt", line);
        c.params.sl = csv::parse_double(fields.at(c_sl), "sl", line);
        c.window_start = Date::parse(fields.at(c_start));
        c.window_end = Date::parse(fields.at(c_end));
        c.params.validate();
        configs.push_back(std::move(c));
    }
    return configs;
}

std::string accuracy_table_csv(const AccuracyTable& table, const std::string& config_hash) {
    std::string out = artifact_header("accuracy_table", config_hash, "accuracies and pct shares in percent");
    out += "ticker";
    for (int h = 0; h < kHoldingPeriods; ++h) out += ",long_" + std::to_string(h);
    out += ",avg_long,max_long,min_long,pct_long,best_day_long";
    for (int h = 0; h < kHoldingPeriods; ++h) out += ",short_" + std::to_string(h);
    out += ",avg_short,max_short,min_short,pct_short,best_day_short";
    out += ",n_long,n_short,test_side,test_holding,p_value_vs_50%,ci_lower,ci_upper\n";

    for (const auto& row : table.rows) {
        out += row.ticker;
        for (int h = 0; h < kHoldingPeriods; ++h)
            out += ',' + format_optional(row.long_acc_pct[static_cast<size_t>(h)]);
        out += ',' + format_optional(row.avg_long) + ',' + format_optional(row.max_long) + ',' +
               format_optional(row.min_long) + ',' + format_double(row.pct_long) + ',' +
               (row.best_day_long ? std::to_string(*row.best_day_long) : "nan");
        for (int h = 0; h < kHoldingPeriods; ++h)
            out += ',' + format_optional(row.short_acc_pct[static_cast<size_t>(h)]);
        out += ',' + format_optional(row.avg_short) + ',' + format_optional(row.max_short) + ',' +
               format_optional(row.min_short) + ',' + format_double(row.pct_short) + ',' +
               (row.best_day_short ? std::to_string(*row.best_day_short) : "nan");
        out += ',' + std::to_string(row.n_long) + ',' + std::to_string(row.n_short);
        if (row.test) {
            out += std::string(",") + (row.test_side == Direction::Long ? "long" : "short") + ',' +
                   std::to_string(row.test_h) + ',' + format_double(row.test->p_value) + ',' +
                   format_double(row.test->ci_lower) + ',' + format_double(row.test->ci_upper);
        } else {
            out += ",nan,nan,nan,nan,nan";
        }
        out += '\n';
    }
    return out;
}

std::string pvalue_summary_csv(std::span<const PvalueSummaryRow> rows, const std::string& config_hash) {
    std::string out = artifact_header("pvalue_summary", config_hash, "pct_below_* in percent of tests");
    out += "signal_type,n,mean,median,std_dev,min,max,pct_below_1,pct_below_5,pct_below_10\n";
    for (const auto& r : rows) {
        out += r.label + ',' + std::to_string(r.n) + ',' + format_double(r.mean) + ',' + format_double(r.median) +
               ',' + format_double(r.stddev) + ',' + format_double(r.min) + ',' + format_double(r.max) + ',' +
               format_double(r.pct_below_1) + ',' + format_double(r.pct_below_5) + ',' +
               format_double(r.pct_below_10) + '\n';
    }
    return out;
}

std::string ci_plot_csv(std::span<const CiPlotRow> rows, const std::string& config_hash) {
    std::string out = artifact_header("ci_plot", config_hash, "accuracy and interval bounds in percent");
    out += "rank,ticker,accuracy,ci_lower,ci_upper,n\n";
    for (const auto& r : rows) {
        out += std::to_string(r.rank) + ',' + r.ticker + ',' + format_double(r.accuracy_pct) + ',' +
               format_double(r.ci_lower_pct) + ',' + format_double(r.ci_upper_pct) + ',' + std::to_string(r.n) +
               '\n';
    }
    return out;
}

std::string timeseries_csv(const PnlSeries& pnl, std::span<const std::optional<double>> rolling_sharpe,
                           std::span<const std::optional<double>> rolling_corr, const std::string& config_hash) {
    std::string out = artifact_header("timeseries", config_hash,
                                      "daily_return/cum_pnl/hwm/drawdown in percentage points of notional");
    out += "date,daily_return,cum_pnl,hwm,drawdown";
    if (!rolling_sharpe.empty()) out += ",rolling_sharpe";
    if (!rolling_corr.empty()) out += ",rolling_corr";
    out += '\n';
    for (size_t i = 0; i < pnl.dates.size(); ++i) {
        out += pnl.dates[i].to_string() + ',' + format_double(pnl.daily_return_pct[i]) + ',' +
               format_double(pnl.cum_pnl[i]) + ',' + format_double(pnl.hwm[i]) + ',' + format_double(pnl.drawdown[i]);
        if (!rolling_sharpe.empty()) out += ',' + format_optional(rolling_sharpe[i]);
        if (!rolling_corr.empty()) out += ',' + format_optional(rolling_corr[i]);
        out += '\n';
    }
    return out;
}

namespace {

void append_aggregate_row(std::string& out, const char* label, const TradeAggregateRow& row) {
    out += label;
    out += ',' + format_double(row.cum_return_pct) + ',' + format_optional(row.sharpe) + ',' +
           format_double(row.mdd_pct) + ',' + format_optional(row.mean_holding) + ',' +
           std::to_string(row.max_holding) + ',' + format_optional(row.win_rate_pct) + ',' +
           std::to_string(row.n_trades) + '\n';
}

} // namespace

std::string metrics_report_csv(const TradeAggregates& aggregates, const std::string& config_hash) {
    std::string out = artifact_header("metrics", config_hash, "cum_return/mdd/win_rate in percent");
    out += "side,cum_return,sharpe,mdd,mean_holding,max_holding,win_rate,n_trades\n";
    append_aggregate_row(out, "long", aggregates.long_side);
    append_aggregate_row(out, "short", aggregates.short_side);
    append_aggregate_row(out, "combined", aggregates.combined);
    return out;
}

std::string turnover_csv(const TurnoverGrid& grid, const std::string& config_hash) {
    std::string out = artifact_header(std::string("turnover_") + side_name(grid.side), config_hash, "");
    out += "rank";
    for (const Quarter& q : grid.quarters) out += ',' + q.to_string();
    out += '\n';
    for (size_t r = 0; r < grid.cells.size(); ++r) {
        out += std::to_string(r + 1);
        for (const std::string& cell : grid.cells[r]) out += ',' + cell;
        out += '\n';
    }
    return out;
}

std::string portfolio_stream_csv(const PortfolioRun& run, const std::string& config_hash) {
    std::string out =
        artifact_header("portfolio_stream", config_hash, "leg returns in percentage points of notional per session");
    out += "date,long,short,combined";
    if (run.levered_stream) out += ",levered";
    out += '\n';
    for (size_t i = 0; i < run.combined_stream.dates.size(); ++i) {
        out += run.combined_stream.dates[i].to_string() + ',' + format_double(run.long_stream.values[i]) + ',' +
               format_double(run.short_stream.values[i]) + ',' + format_double(run.combined_stream.values[i]);
        if (run.levered_stream) out += ',' + format_double(run.levered_stream->values[i]);
        out += '\n';
    }
    return out;
}

namespace {

json summary_json(const RiskSummary& s) {
    json j;
    j["final_cum_return_pct"] = s.final_cum_return_pct;
    j["peak_cum_return_pct"] = s.peak_cum_return_pct;
    j["mdd_pct"] = s.mdd_pct;
    if (s.ann_sharpe) j["ann_sharpe"] = *s.ann_sharpe;
    if (s.correlation_to_benchmark) j["correlation_to_benchmark"] = *s.correlation_to_benchmark;
    j["n_trades"] = s.n_trades;
    if (s.win_rate_pct) j["win_rate_pct"] = *s.win_rate_pct;
    if (s.mean_holding) j["mean_holding_days"] = *s.mean_holding;
    j["max_holding_days"] = s.max_holding;
    return j;
}

} // namespace

std::string portfolio_report_json(const PortfolioRun& run, const std::string& config_hash) {
    json j;
    j["config_hash"] = config_hash;
    j["units"] = "cum_return/mdd/win_rate in percent; holding in sessions";
    j["regime_split"] = run.regime_split.to_string();
    j["legs"]["long"] = summary_json(run.long_summary);
    j["legs"]["short"] = summary_json(run.short_summary);
    j["legs"]["combined"] = summary_json(run.combined_summary);
    if (run.levered_summary) j["legs"]["levered"] = summary_json(*run.levered_summary);
    if (run.before_split) j["regimes"]["before"] = summary_json(*run.before_split);
    if (run.after_split) j["regimes"]["after"] = summary_json(*run.after_split);
    json steps = json::array();
    for (const StepResult& s : run.steps) {
        json step;
        step["trading_quarter"] = s.step.trading.to_string();
        step["calibration"] = s.step.calibration_first.to_string() + ".." + s.step.calibration_last.to_string();
        step["long_book"] = s.long_book.tickers;
        step["short_book"] = s.short_book.tickers;
        step["n_trades"] = s.trades.size();
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    j["diagnostics"] = run.diagnostics;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.is_open()) throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw InputError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

} // namespace sigsim::reports
