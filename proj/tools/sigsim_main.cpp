// sigsim command-line front end: reproducible pipelines over price and
// signal files. Every artifact embeds the config hash; identical config +
// inputs produce identical bytes.

#include "sigsim/errors.hpp"
#include "sigsim/market_data.hpp"
#include "sigsim/perf.hpp"
#include "sigsim/portfolio.hpp"
#include "sigsim/reports.hpp"
#include "sigsim/run_config.hpp"
#include "sigsim/scenario_grid.hpp"
#include "sigsim/signals.hpp"
#include "sigsim/stats.hpp"
#include "sigsim/synth.hpp"
#include "sigsim/trade_sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace sigsim;

namespace {

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> prices, signals, benchmark, out_dir;
    std::optional<int> workers;
    std::optional<uint64_t> seed;
    std::optional<std::string> criterion;
    std::optional<long> min_trades;
    std::optional<double> deadband;
    std::optional<int> top_n;
    std::optional<std::string> rank_metric;
    std::optional<std::string> weights;
    std::optional<double> leverage, leverage_cost;
    std::optional<double> beta_bound;
    std::optional<long> min_observations;
    std::optional<std::string> start_quarter, end_quarter;
    std::optional<int> calibration_quarters;
    std::optional<std::string> split_date;
    std::optional<std::vector<std::string>> sides;
    std::optional<bool> include_upper;
    std::optional<double> target_accuracy, flat_share;
    std::optional<std::vector<int>> horizons;
    std::optional<std::string> tiebreak, overlap, combine;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration");
    cmd->add_option("--prices", o.prices, "price file (ticker,date,open,high,low,close[,volume])");
    cmd->add_option("--signals", o.signals, "signal file (created_at,ticker,target_date,forecast_return,horizon)");
    cmd->add_option("--benchmark", o.benchmark, "benchmark price file, single symbol");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--seed", o.seed, "generator seed");
    cmd->add_option("--criterion", o.criterion, "max_sharpe | min_mdd | max_cum_return");
    cmd->add_option("--min-trades", o.min_trades, "qualifier threshold for optimal selection");
    cmd->add_option("--deadband", o.deadband, "flat deadband in percent");
    cmd->add_option("--top-n", o.top_n, "book size per side");
    cmd->add_option("--rank-metric", o.rank_metric, "sharpe|mdd|final_cum_return|sortino|beta|downside_risk|accuracy");
    cmd->add_option("--weights", o.weights, "equal | linear_decay");
    cmd->add_option("--leverage", o.leverage, "leverage multiplier (>= 1)");
    cmd->add_option("--leverage-cost", o.leverage_cost, "annual cost of capital, percent");
    cmd->add_option("--beta-bound", o.beta_bound, "beta filter bound (exclude above)");
    cmd->add_option("--min-observations", o.min_observations, "selection filter on calibration observations");
    cmd->add_option("--start-quarter", o.start_quarter, "schedule start, e.g. 2021Q3");
    cmd->add_option("--end-quarter", o.end_quarter, "schedule end, e.g. 2025Q2");
    cmd->add_option("--calibration-quarters", o.calibration_quarters, "trailing calibration window length");
    cmd->add_option("--split-date", o.split_date, "regime split date YYYY-MM-DD");
    cmd->add_option("--sides", o.sides, "sides for the grid (long short both)");
    cmd->add_option("--include-upper", o.include_upper, "include the upper pt/sl grid endpoints");
    cmd->add_option("--target-accuracy", o.target_accuracy, "synth calibration target in [0,1]");
    cmd->add_option("--flat-share", o.flat_share, "synth share of flat records in [0,1]");
    cmd->add_option("--horizons", o.horizons, "synth horizons (subset of 1..10)");
    cmd->add_option("--tiebreak", o.tiebreak, "stop_first | profit_first");
    cmd->add_option("--overlap", o.overlap, "single_position | allow_overlap");
    cmd->add_option("--combine", o.combine, "sum | average");
}

RunConfig resolve_config(const Overrides& o) {
    RunConfig config;
    if (o.config_path) config = load_config(*o.config_path);
    if (o.prices) config.price_file = *o.prices;
    if (o.signals) config.signal_file = *o.signals;
    if (o.benchmark) config.benchmark_file = *o.benchmark;
    if (o.out_dir) config.out_dir = *o.out_dir;
    if (o.workers) config.workers = *o.workers;
    if (o.seed) config.seed = *o.seed;
    if (o.criterion) config.criterion = *o.criterion;
    if (o.min_trades) config.min_trades = *o.min_trades;
    if (o.deadband) config.deadband_pct = *o.deadband;
    if (o.top_n) config.top_n = *o.top_n;
    if (o.rank_metric) config.rank_metric = *o.rank_metric;
    if (o.weights) config.weight_scheme = *o.weights;
    if (o.leverage) config.leverage_multiplier = *o.leverage;
    if (o.leverage_cost) config.leverage_cost_pct = *o.leverage_cost;
    if (o.beta_bound) config.beta_bound = *o.beta_bound;
    if (o.min_observations) config.min_observations = *o.min_observations;
    if (o.start_quarter) config.start_quarter = *o.start_quarter;
    if (o.end_quarter) config.end_quarter = *o.end_quarter;
    if (o.calibration_quarters) config.calibration_quarters = *o.calibration_quarters;
    if (o.split_date) config.regime_split = *o.split_date;
    if (o.sides) config.sides = *o.sides;
    if (o.include_upper) config.grid_include_upper = *o.include_upper;
    if (o.target_accuracy) config.target_accuracy = *o.target_accuracy;
    if (o.flat_share) config.flat_share = *o.flat_share;
    if (o.horizons) config.horizons = *o.horizons;
    if (o.tiebreak) config.tiebreak = *o.tiebreak;
    if (o.overlap) config.overlap = *o.overlap;
    if (o.combine) config.combine = *o.combine;
    return config;
}

std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
    return std::filesystem::path(config.out_dir) / name;
}

struct LoadedInputs {
    IngestResult prices;
    SignalSet signals;
    std::optional<IngestResult> benchmark;

    const PriceSeries* benchmark_series() const {
        if (!benchmark || benchmark->series.empty()) return nullptr;
        return &benchmark->series.front();
    }
};

LoadedInputs load_inputs(const RunConfig& config, bool need_prices, bool need_signals) {
    LoadedInputs inputs;
    if (need_prices) {
        if (config.price_file.empty()) throw InputError("no price file given (--prices or config.price_file)");
        inputs.prices = ingest_prices(config.price_file);
    }
    if (need_signals) {
        if (config.signal_file.empty()) throw InputError("no signal file given (--signals or config.signal_file)");
        inputs.signals = SignalSet::load(config.signal_file);
    }
    if (!config.benchmark_file.empty()) {
        inputs.benchmark = ingest_prices(config.benchmark_file);
        if (inputs.benchmark->series.size() != 1)
            throw InputError("benchmark file must carry exactly one symbol, got " +
                             std::to_string(inputs.benchmark->series.size()));
    }
    return inputs;
}

int cmd_ingest(const RunConfig& config) {
    const LoadedInputs inputs = load_inputs(config, true, !config.signal_file.empty());
    std::printf("prices: %zu tickers, %zu sessions, %zu rejected rows\n", inputs.prices.series.size(),
                inputs.prices.calendar.size(), inputs.prices.rejected.size());
    for (const auto& r : inputs.prices.rejected)
        std::printf("  line %zu [%s]: %s\n", r.line, r.ticker.c_str(), r.message.c_str());
    if (!config.signal_file.empty()) {
        const QuarantineResult q =
            quarantine_signals(inputs.signals, inputs.prices.calendar, config.session_open_minute());
        std::printf("signals: %zu records, %zu pass the ex-ante check, %zu quarantined\n", inputs.signals.size(),
                    q.admitted.size(), q.quarantined.size());
        for (const auto& reason : q.quarantined) std::printf("  %s\n", reason.c_str());
    }
    if (inputs.benchmark)
        std::printf("benchmark: %s, %zu sessions\n", inputs.benchmark->series.front().ticker().c_str(),
                    inputs.benchmark->series.front().size());
    return 0;
}

int cmd_synth(const RunConfig& config, int gen_tickers, int gen_sessions) {
    const std::string hash = config_hash_hex(config);

    std::vector<PriceSeries> universe;
    if (gen_tickers > 0) {
        for (int t = 0; t < gen_tickers; ++t) {
            char name[16];
            std::snprintf(name, sizeof name, "SYN%03d", t);
            PriceWalkSpec walk;
            walk.seed = config.seed + static_cast<uint64_t>(t);
            universe.push_back(random_prices(name, Date::parse("2021-01-04"), gen_sessions, walk));
        }
        write_price_file(out_path(config, "prices.csv").string(), universe, "sigsim synth config_hash=" + hash);
    } else {
        const LoadedInputs inputs = load_inputs(config, true, false);
        universe = inputs.prices.series;
    }
    if (universe.empty()) throw InputError("synth: no price series to generate signals for");

    std::vector<Date> all_dates;
    for (const auto& s : universe)
        for (const auto& b : s.bars()) all_dates.push_back(b.date);
    std::sort(all_dates.begin(), all_dates.end());
    all_dates.erase(std::unique(all_dates.begin(), all_dates.end()), all_dates.end());
    const TradingCalendar calendar(std::move(all_dates));

    GeneratorSpec spec;
    spec.seed = config.seed;
    spec.horizons = config.horizons;
    spec.flat_share = config.flat_share;
    spec.target_accuracy = config.target_accuracy;

    std::vector<SignalRecord> records;
    for (const auto& series : universe) {
        const auto generated = config.target_accuracy == 0.5
                                   ? random_signals(series, calendar, series.first_date(), series.last_date(), spec)
                                   : calibrated_signals(series, calendar, series.first_date(), series.last_date(),
                                                        spec);
        records.insert(records.end(), generated.begin(), generated.end());
    }
    write_signal_file(out_path(config, "signals.csv").string(), records, "sigsim synth config_hash=" + hash);
    std::printf("wrote %zu signal records for %zu tickers to %s\n", records.size(), universe.size(),
                out_path(config, "signals.csv").string().c_str());
    return 0;
}

int cmd_grid(const RunConfig& config) {
    const std::string hash = config_hash_hex(config);
    const LoadedInputs inputs = load_inputs(config, true, true);
    QuarantineResult q = quarantine_signals(inputs.signals, inputs.prices.calendar, config.session_open_minute());
    const SignalSet admitted(std::move(q.admitted));
    if (!q.quarantined.empty())
        std::fprintf(stderr, "warning: %zu signal(s) quarantined by the ex-ante check\n", q.quarantined.size());

    const auto results = run_grid_universe(inputs.prices.series, admitted, config.grid(), config.side_list(),
                                           config.grid_options());
    reports::write_file(out_path(config, "scenarios.csv").string(), reports::scenario_dump(results, hash));

    Date wstart(0), wend(0);
    if (!inputs.prices.calendar.empty()) {
        wstart = inputs.prices.calendar.sessions().front();
        wend = inputs.prices.calendar.sessions().back();
    }
    const OptimalSelection selection =
        select_optimal_per_ticker(results, config.criterion_value(), config.min_trades, wstart, wend);
    reports::write_file(out_path(config, "optimal_configs.csv").string(),
                        reports::optimal_config_csv(selection.configs, hash));
    for (const auto& d : selection.diagnostics) std::fprintf(stderr, "warning: %s\n", d.c_str());
    std::printf("wrote %zu scenario rows, %zu optimal configs\n", results.size(), selection.configs.size());
    return 0;
}

std::vector<std::pair<std::string, TickerStrategy>> strategies_from(const std::vector<OptimalConfig>& configs) {
    std::vector<std::pair<std::string, TickerStrategy>> strategies;
    for (const auto& c : configs) {
        TickerStrategy s;
        s.side = c.strategy == DirectionPolicy::ShortOnly ? Direction::Short : Direction::Long;
        s.period_signal = c.period_signal;
        strategies.emplace_back(c.ticker, s);
    }
    return strategies;
}

int cmd_stats(const RunConfig& config, const std::string& optimal_path) {
    const std::string hash = config_hash_hex(config);
    const LoadedInputs inputs = load_inputs(config, true, true);
    if (inputs.signals.empty()) std::fprintf(stderr, "warning: signal file is empty; emitting empty tables\n");

    std::vector<OptimalConfig> optimal;
    if (!optimal_path.empty()) optimal = reports::load_optimal_configs(optimal_path);

    AccuracyTableOptions options;
    options.deadband_pct = config.deadband_pct;
    options.ci_level = config.ci_level;
    options.two_sided = config.two_sided;
    options.baseline_p0 = config.baseline_p0;
    const AccuracyTable table =
        accuracy_table(inputs.prices.series, inputs.signals, strategies_from(optimal), options);
    reports::write_file(out_path(config, "accuracy_table.csv").string(), reports::accuracy_table_csv(table, hash));
    for (const auto& t : table.omitted) std::fprintf(stderr, "warning: %s: no signals, omitted\n", t.c_str());

    std::vector<double> long_p, short_p, both_p;
    for (const auto& row : table.rows) {
        if (row.long_test) {
            long_p.push_back(row.long_test->p_value);
            both_p.push_back(row.long_test->p_value);
        }
        if (row.short_test) {
            short_p.push_back(row.short_test->p_value);
            both_p.push_back(row.short_test->p_value);
        }
    }
    std::vector<PvalueSummaryRow> summary;
    if (auto r = pvalue_summary(long_p, "long")) summary.push_back(*r);
    if (auto r = pvalue_summary(short_p, "short")) summary.push_back(*r);
    if (auto r = pvalue_summary(both_p, "both")) summary.push_back(*r);
    reports::write_file(out_path(config, "pvalue_summary.csv").string(), reports::pvalue_summary_csv(summary, hash));

    reports::write_file(out_path(config, "ci_plot_long.csv").string(),
                        reports::ci_plot_csv(ci_plot_data(table.rows, Direction::Long, config.ci_level), hash));
    reports::write_file(out_path(config, "ci_plot_short.csv").string(),
                        reports::ci_plot_csv(ci_plot_data(table.rows, Direction::Short, config.ci_level), hash));
    std::printf("wrote accuracy table (%zu rows), p-value summary, CI plot data\n", table.rows.size());
    return 0;
}

int cmd_backtest(const RunConfig& config, const std::string& ticker, const std::string& optimal_path) {
    const std::string hash = config_hash_hex(config);
    const LoadedInputs inputs = load_inputs(config, true, true);
    const PriceSeries* series = inputs.prices.find(ticker);
    if (!series) throw InputError("ticker " + ticker + " not in the price file");

    const auto configs = reports::load_optimal_configs(optimal_path);
    const OptimalConfig* chosen = nullptr;
    for (const auto& c : configs)
        if (c.ticker == ticker) chosen = &c;
    if (!chosen) throw InputError("no optimal config for " + ticker + " in " + optimal_path);

    QuarantineResult q = quarantine_signals(inputs.signals, inputs.prices.calendar, config.session_open_minute());
    const SignalSet admitted(std::move(q.admitted));

    std::vector<SignalRecord> stream_signals;
    for (const auto& s : admitted.for_ticker_horizon(ticker, chosen->period_signal)) stream_signals.push_back(s);

    StreamOptions so;
    so.direction_policy = chosen->strategy;
    so.overlap = config.overlap_value();
    so.tiebreak = config.tiebreak_value();
    so.deadband_pct = config.deadband_pct;
    const StreamResult stream = simulate_stream(*series, stream_signals, chosen->params, so);

    const TradeAggregates aggregates = trade_aggregates(stream.trades, stream.dates);
    reports::write_file(out_path(config, "backtest_" + ticker + "_metrics.csv").string(),
                        reports::metrics_report_csv(aggregates, hash));

    const PnlSeries pnl = cum_pnl(stream.dates, stream.daily_return_pct);
    const auto rolling = rolling_sharpe(pnl.daily_return_pct, config.rolling_sharpe_window);
    std::vector<std::optional<double>> rolling_benchmark_corr;
    if (const PriceSeries* bench = inputs.benchmark_series()) {
        // Benchmark close-to-close percent returns aligned to the ticker's sessions.
        std::vector<double> bench_ret(pnl.dates.size(), 0.0);
        for (size_t i = 0; i < pnl.dates.size(); ++i) {
            const auto idx = bench->index_of(pnl.dates[i]);
            if (idx && *idx > 0)
                bench_ret[i] = (bench->bar(*idx).close / bench->bar(*idx - 1).close - 1.0) * 100.0;
        }
        rolling_benchmark_corr = rolling_corr(pnl.daily_return_pct, bench_ret, config.rolling_corr_window);
    }
    reports::write_file(out_path(config, "backtest_" + ticker + "_timeseries.csv").string(),
                        reports::timeseries_csv(pnl, rolling, rolling_benchmark_corr, hash));
    std::printf("wrote backtest report for %s (%zu trades)\n", ticker.c_str(), stream.trades.size());
    return 0;
}

int cmd_portfolio(const RunConfig& config, const std::string& optimal_path) {
    const std::string hash = config_hash_hex(config);
    const LoadedInputs inputs = load_inputs(config, true, true);
    const auto configs = reports::load_optimal_configs(optimal_path);
    if (configs.empty()) throw InputError("no optimal configs in " + optimal_path);

    QuarantineResult q = quarantine_signals(inputs.signals, inputs.prices.calendar, config.session_open_minute());
    const SignalSet admitted(std::move(q.admitted));

    Quarter start = config.start_quarter.empty() ? Quarter::of(inputs.prices.calendar.sessions().front())
                                                 : Quarter::parse(config.start_quarter);
    Quarter end = config.end_quarter.empty() ? Quarter::of(inputs.prices.calendar.sessions().back())
                                             : Quarter::parse(config.end_quarter);
    const RebalanceSchedule schedule =
        build_schedule(inputs.prices.calendar, start, end, config.calibration_quarters);

    PortfolioInputs pin;
    pin.prices = inputs.prices.series;
    pin.signals = &admitted;
    pin.configs = configs;
    pin.benchmark = inputs.benchmark_series();
    pin.calendar = &inputs.prices.calendar;
    const PortfolioRun run = run_walk_forward(pin, schedule, config.portfolio_options());

    reports::write_file(out_path(config, "portfolio_report.json").string(),
                        reports::portfolio_report_json(run, hash));
    reports::write_file(out_path(config, "portfolio_stream.csv").string(),
                        reports::portfolio_stream_csv(run, hash));
    reports::write_file(out_path(config, "turnover_long.csv").string(),
                        reports::turnover_csv(turnover_grid(run, DirectionPolicy::LongOnly), hash));
    reports::write_file(out_path(config, "turnover_short.csv").string(),
                        reports::turnover_csv(turnover_grid(run, DirectionPolicy::ShortOnly), hash));

    // Combined-stream PnL curve with rolling panels.
    const PnlSeries pnl = to_pnl(run.combined_stream);
    const auto rolling = rolling_sharpe(pnl.daily_return_pct, config.rolling_sharpe_window);
    std::vector<std::optional<double>> rolling_benchmark_corr;
    if (const PriceSeries* bench = inputs.benchmark_series()) {
        std::vector<double> bench_ret(pnl.dates.size(), 0.0);
        for (size_t i = 0; i < pnl.dates.size(); ++i) {
            const auto idx = bench->index_of(pnl.dates[i]);
            if (idx && *idx > 0)
                bench_ret[i] = (bench->bar(*idx).close / bench->bar(*idx - 1).close - 1.0) * 100.0;
        }
        rolling_benchmark_corr = rolling_corr(pnl.daily_return_pct, bench_ret, config.rolling_corr_window);
    }
    reports::write_file(out_path(config, "portfolio_timeseries.csv").string(),
                        reports::timeseries_csv(pnl, rolling, rolling_benchmark_corr, hash));
    std::printf("wrote portfolio report: %zu steps, combined cum return %.4f%%\n", run.steps.size(),
                run.combined_summary.final_cum_return_pct);
    return 0;
}

int cmd_report(const RunConfig& config) {
    const std::string hash = config_hash_hex(config);
    cmd_grid(config);
    const std::string optimal = out_path(config, "optimal_configs.csv").string();
    cmd_stats(config, optimal);
    cmd_portfolio(config, optimal);

    nlohmann::json manifest;
    manifest["config_hash"] = hash;
    manifest["config"] = nlohmann::json::parse(canonical_json(config));
    manifest["artifacts"] = {"scenarios.csv",      "optimal_configs.csv", "accuracy_table.csv",
                             "pvalue_summary.csv", "ci_plot_long.csv",    "ci_plot_short.csv",
                             "portfolio_report.json", "portfolio_stream.csv", "portfolio_timeseries.csv",
                             "turnover_long.csv", "turnover_short.csv"};
    reports::write_file(out_path(config, "manifest.json").string(), manifest.dump(2) + "\n");
    std::printf("wrote manifest.json (config_hash=%s)\n", hash.c_str());
    return 0;
}

void emit_error(const char* kind, const std::exception& e) {
    nlohmann::json record;
    record["error"] = kind;
    record["message"] = e.what();
    std::cerr << record.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic signal backtesting and portfolio evaluation"};
    app.require_subcommand(1);

    Overrides o;
    int gen_tickers = 0;
    int gen_sessions = 260;
    std::string ticker;
    std::string optimal_path;

    auto* ingest = app.add_subcommand("ingest", "validate price/signal/benchmark files");
    add_common_options(ingest, o);

    auto* synth = app.add_subcommand("synth", "generate synthetic signals (and optionally prices)");
    add_common_options(synth, o);
    synth->add_option("--gen-prices", gen_tickers, "also generate a random-walk price file with N tickers");
    synth->add_option("--gen-sessions", gen_sessions, "sessions per generated ticker");

    auto* grid = app.add_subcommand("grid", "scenario grid search and optimal execution configs");
    add_common_options(grid, o);

    auto* stats = app.add_subcommand("stats", "accuracy tables, z-tests, confidence intervals");
    add_common_options(stats, o);
    stats->add_option("--optimal", optimal_path, "optimal-config file from `grid`");

    auto* backtest = app.add_subcommand("backtest", "single-ticker risk/return report");
    add_common_options(backtest, o);
    backtest->add_option("--ticker", ticker, "ticker to backtest")->required();
    backtest->add_option("--optimal", optimal_path, "optimal-config file from `grid`")->required();

    auto* portfolio = app.add_subcommand("portfolio", "walk-forward long/short portfolio run");
    add_common_options(portfolio, o);
    portfolio->add_option("--optimal", optimal_path, "optimal-config file from `grid`")->required();

    auto* report = app.add_subcommand("report", "full pipeline: grid + stats + portfolio + manifest");
    add_common_options(report, o);

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig config = resolve_config(o);
        std::filesystem::create_directories(config.out_dir);
        if (app.got_subcommand(ingest)) return cmd_ingest(config);
        if (app.got_subcommand(synth)) return cmd_synth(config, gen_tickers, gen_sessions);
        if (app.got_subcommand(grid)) return cmd_grid(config);
        if (app.got_subcommand(stats)) return cmd_stats(config, optimal_path);
        if (app.got_subcommand(backtest)) return cmd_backtest(config, ticker, optimal_path);
        if (app.got_subcommand(portfolio)) return cmd_portfolio(config, optimal_path);
        if (app.got_subcommand(report)) return cmd_report(config);
    } catch (const InputError& e) {
        emit_error("input", e);
        return 1;
    } catch (const ComputeError& e) {
        emit_error("compute", e);
        return 2;
    } catch (const std::exception& e) {
        emit_error("internal", e);
        return 2;
    }
    return 0;
}
