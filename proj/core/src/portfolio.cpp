#include "sigsim/portfolio.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

namespace sigsim {

RebalanceSchedule build_schedule(const TradingCalendar& calendar, Quarter start, Quarter end,
                                 int calibration_quarters) {
    if (calendar.empty()) throw ComputeError("empty trading calendar");
    if (calibration_quarters < 1) throw ComputeError("calibration_quarters must be >= 1");

    const Quarter cal_first = Quarter::of(calendar.sessions().front());
    const Quarter cal_last = Quarter::of(calendar.sessions().back());
    Quarter first = std::max(start, cal_first);
    Quarter last = std::min(end, cal_last);

    std::vector<Quarter> quarters;
    for (Quarter q = first; q <= last; q = q.next()) quarters.push_back(q);

    const size_t need = static_cast<size_t>(calibration_quarters) + 1;
    if (quarters.size() < need)
        throw ComputeError("insufficient span: " + std::to_string(quarters.size()) + " quarters available, need >= " +
                           std::to_string(need));

    RebalanceSchedule schedule;
    for (size_t i = 0; i + static_cast<size_t>(calibration_quarters) < quarters.size(); ++i) {
        RebalanceStep step;
        step.calibration_first = quarters[i];
        step.calibration_last = quarters[i + static_cast<size_t>(calibration_quarters) - 1];
        step.trading = quarters[i + static_cast<size_t>(calibration_quarters)];
        schedule.steps.push_back(step);
    }
    return schedule;
}

const char* to_string(RankMetric m) {
    switch (m) {
        case RankMetric::Sharpe: return "sharpe";
        case RankMetric::Mdd: return "mdd";
        case RankMetric::FinalCumReturn: return "final_cum_return";
        case RankMetric::Sortino: return "sortino";
        case RankMetric::Beta: return "beta";
        case RankMetric::DownsideRisk: return "downside_risk";
        case RankMetric::Accuracy: return "accuracy";
    }
    return "?";
}

RankMetric rank_metric_from_string(const std::string& name) {
    for (RankMetric m : {RankMetric::Sharpe, RankMetric::Mdd, RankMetric::FinalCumReturn, RankMetric::Sortino,
                         RankMetric::Beta, RankMetric::DownsideRisk, RankMetric::Accuracy})
        if (name == to_string(m)) return m;
    throw InputError("unknown rank metric '" + name + "'");
}

bool default_ascending(RankMetric m) {
    switch (m) {
        case RankMetric::Mdd:
        case RankMetric::Beta:
        case RankMetric::DownsideRisk:
            return true;
        default:
            return false;
    }
}

CalibrationRecord calibration_metrics(const PriceSeries& prices, Date window_start, Date window_end,
                                      const OptimalConfig& config, const SignalSet& signals,
                                      const PriceSeries* benchmark, const PortfolioSimOptions& options) {
    CalibrationRecord record;
    record.ticker = config.ticker;
    record.side = config.strategy;

    const PriceSeries window_prices = prices.between(window_start, window_end);
    if (window_prices.empty()) return record;

    // Signals of the configured horizon created inside the window.
    std::vector<SignalRecord> window_signals;
    for (const auto& s : signals.for_ticker_horizon(config.ticker, config.period_signal))
        if (s.created_at.date >= window_start && s.created_at.date <= window_end) window_signals.push_back(s);

    StreamOptions stream_options;
    stream_options.direction_policy = config.strategy;
    stream_options.overlap = options.overlap;
    stream_options.tiebreak = options.tiebreak;
    stream_options.deadband_pct = options.deadband_pct;
    const StreamResult sim = simulate_stream(window_prices, window_signals, config.params, stream_options);

    // Rebuild the daily stream with the truncation convention applied.
    std::vector<double> daily(window_prices.size(), 0.0);
    for (const TradeResult& t : sim.trades) {
        if (t.exit_reason == ExitReason::Truncated && !options.include_truncated_in_metrics) continue;
        const auto idx = window_prices.index_of(t.exit_date);
        if (idx) daily[*idx] += t.trade_return * 100.0;
        record.final_cum_return_pct += t.trade_return * 100.0;
    }

    std::vector<Date> dates;
    dates.reserve(window_prices.size());
    for (const Bar& b : window_prices.bars()) dates.push_back(b.date);
    const PnlSeries pnl = cum_pnl(std::move(dates), std::move(daily));
    record.mdd_pct = max_drawdown(pnl);
    record.sharpe = ann_sharpe(pnl.daily_return_pct, 0.0, options.periods_per_year);
    const SortinoResult sortino = sortino_and_downside(pnl.daily_return_pct, 0.0, options.periods_per_year);
    record.sortino = sortino.sortino;
    record.downside_risk = sortino.downside_deviation;

    // Directional accuracy of the signals this config trades, evaluated at
    // the configured maximum hold, window prices only.
    const Direction side =
        config.strategy == DirectionPolicy::ShortOnly ? Direction::Short : Direction::Long;
    if (config.strategy == DirectionPolicy::Both) {
        long n = 0, hits = 0;
        for (Direction d : {Direction::Long, Direction::Short}) {
            if (auto a = directional_accuracy(window_signals, window_prices, d, config.params.mhp,
                                              options.deadband_pct)) {
                n += a->n;
                hits += a->hits;
            }
        }
        if (n > 0) record.accuracy_pct = 100.0 * static_cast<double>(hits) / static_cast<double>(n);
        record.n_observations = n;
    } else if (auto a = directional_accuracy(window_signals, window_prices, side, config.params.mhp,
                                             options.deadband_pct)) {
        record.accuracy_pct = a->accuracy_pct;
        record.n_observations = a->n;
    }

    if (benchmark) {
        // Market beta of the stock over the window, close-to-close returns
        // on the dates both series share.
        const PriceSeries window_bench = benchmark->between(window_start, window_end);
        std::vector<double> stock_ret, bench_ret;
        size_t bi = 0;
        const auto bench_bars = window_bench.bars();
        const auto stock_bars = window_prices.bars();
        std::optional<double> prev_stock, prev_bench;
        for (size_t si = 0; si < stock_bars.size(); ++si) {
            while (bi < bench_bars.size() && bench_bars[bi].date < stock_bars[si].date) ++bi;
            if (bi >= bench_bars.size()) break;
            if (bench_bars[bi].date != stock_bars[si].date) continue;
            if (prev_stock && prev_bench) {
                stock_ret.push_back(stock_bars[si].close / *prev_stock - 1.0);
                bench_ret.push_back(bench_bars[bi].close / *prev_bench - 1.0);
            }
            prev_stock = stock_bars[si].close;
            prev_bench = bench_bars[bi].close;
        }
        record.beta = beta(stock_ret, bench_ret);
    }
    return record;
}

namespace {

std::optional<double> rank_value(const CalibrationRecord& r, RankMetric m) {
    switch (m) {
        case RankMetric::Sharpe: return r.sharpe;
        case RankMetric::Mdd: return r.mdd_pct;
        case RankMetric::FinalCumReturn: return r.final_cum_return_pct;
        case RankMetric::Sortino: return r.sortino;
        case RankMetric::Beta: return r.beta;
        case RankMetric::DownsideRisk: return r.downside_risk;
        case RankMetric::Accuracy: return r.accuracy_pct;
    }
    return std::nullopt;
}

} // namespace

BookSelection select_book(std::span<const CalibrationRecord> records, const SelectionRule& rule) {
    if (rule.top_n < 1) throw ComputeError("top_n must be >= 1");
    BookSelection selection;
    const bool ascending = rule.ascending.value_or(default_ascending(rule.rank_metric));

    struct Candidate {
        const CalibrationRecord* record;
        double value;
    };
    std::vector<Candidate> longs, shorts;

    for (const CalibrationRecord& r : records) {
        if (r.n_observations < rule.min_observations) {
            selection.diagnostics.push_back(r.ticker + ": dropped, " + std::to_string(r.n_observations) +
                                            " observations < " + std::to_string(rule.min_observations));
            continue;
        }
        if (rule.beta_filter && r.beta) {
            const bool excluded = rule.beta_filter->exclude_above ? *r.beta > rule.beta_filter->bound
                                                                  : *r.beta < rule.beta_filter->bound;
            if (excluded) {
                selection.diagnostics.push_back(r.ticker + ": dropped by beta filter");
                continue;
            }
        }
        if (rule.min_sharpe && (!r.sharpe || *r.sharpe < *rule.min_sharpe)) {
            selection.diagnostics.push_back(r.ticker + ": dropped by sharpe filter");
            continue;
        }
        const auto value = rank_value(r, rule.rank_metric);
        if (!value) {
            selection.diagnostics.push_back(r.ticker + ": rank metric " + to_string(rule.rank_metric) +
                                            " undefined");
            continue;
        }
        if (r.side == DirectionPolicy::LongOnly || r.side == DirectionPolicy::Both)
            longs.push_back({&r, *value});
        if (r.side == DirectionPolicy::ShortOnly || r.side == DirectionPolicy::Both)
            shorts.push_back({&r, *value});
    }

    auto take_top = [&](std::vector<Candidate>& candidates, Book& book, const char* label) {
        std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.value != b.value) return ascending ? a.value < b.value : a.value > b.value;
            return a.record->ticker < b.record->ticker;
        });
        const size_t take = std::min(candidates.size(), static_cast<size_t>(rule.top_n));
        for (size_t i = 0; i < take; ++i) book.tickers.push_back(candidates[i].record->ticker);
        if (take < static_cast<size_t>(rule.top_n))
            selection.diagnostics.push_back(std::string(label) + " book short: " + std::to_string(take) + " of " +
                                            std::to_string(rule.top_n) + " qualifiers");
    };
    take_top(longs, selection.long_book, "long");
    take_top(shorts, selection.short_book, "short");
    return selection;
}

const char* to_string(WeightKind k) {
    return k == WeightKind::Equal ? "equal" : "linear_decay";
}

WeightKind weight_kind_from_string(const std::string& name) {
    if (name == "equal") return WeightKind::Equal;
    if (name == "linear_decay") return WeightKind::LinearDecay;
    throw InputError("unknown weight scheme '" + name + "'");
}

std::vector<double> book_weights(size_t book_size, int top_n, WeightKind kind) {
    std::vector<double> weights(book_size, 0.0);
    if (book_size == 0) return weights;
    if (kind == WeightKind::Equal) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(book_size));
        return weights;
    }
    // w_rank proportional to (top_n + 1 - rank), rank 1-based.
    double total = 0.0;
    for (size_t i = 0; i < book_size; ++i) {
        weights[i] = static_cast<double>(top_n - static_cast<int>(i));
        if (weights[i] <= 0.0) throw ComputeError("book larger than top_n");
        total += weights[i];
    }
    for (double& w : weights) w /= total;
    return weights;
}

DailySeries apply_leverage(const DailySeries& stream, const LeverageSpec& spec, int periods_per_year,
                           std::span<const Date> active_dates) {
    if (spec.multiplier < 1.0) throw ComputeError("leverage multiplier must be >= 1");
    const double daily_cost =
        (spec.multiplier - 1.0) * spec.annual_cost_pct / static_cast<double>(periods_per_year);

    DailySeries out = stream;
    for (size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] *= spec.multiplier;
        if (daily_cost != 0.0) {
            const bool charge = active_dates.empty() ||
                                std::binary_search(active_dates.begin(), active_dates.end(), out.dates[i]);
            if (charge) out.values[i] -= daily_cost;
        }
    }
    return out;
}

StepResult run_step(const PortfolioInputs& inputs, const RebalanceStep& step, const BookSelection& books,
                    const PortfolioOptions& options) {
    StepResult result;
    result.step = step;
    result.long_book = books.long_book;
    result.short_book = books.short_book;
    result.long_weights = book_weights(books.long_book.tickers.size(), options.rule.top_n, options.weights);
    result.short_weights = book_weights(books.short_book.tickers.size(), options.rule.top_n, options.weights);

    auto find_series = [&](const std::string& ticker) -> const PriceSeries* {
        for (const PriceSeries& s : inputs.prices)
            if (s.ticker() == ticker) return &s;
        return nullptr;
    };
    auto find_config = [&](const std::string& ticker) -> const OptimalConfig* {
        for (const OptimalConfig& c : inputs.configs)
            if (c.ticker == ticker) return &c;
        return nullptr;
    };

    auto trade_book = [&](const Book& book, const std::vector<double>& weights, DirectionPolicy side) {
        for (size_t i = 0; i < book.tickers.size(); ++i) {
            const std::string& ticker = book.tickers[i];
            const PriceSeries* series = find_series(ticker);
            const OptimalConfig* config = find_config(ticker);
            if (!series || !config) {
                result.diagnostics.push_back(ticker + ": missing series or config in step " +
                                             step.trading.to_string());
                continue;
            }
            std::vector<SignalRecord> quarter_signals;
            for (const auto& s : inputs.signals->for_ticker_horizon(ticker, config->period_signal))
                if (s.created_at.date >= step.trading_start() && s.created_at.date <= step.trading_end())
                    quarter_signals.push_back(s);

            StreamOptions stream_options;
            stream_options.direction_policy = side;
            stream_options.overlap = options.sim.overlap;
            stream_options.tiebreak = options.sim.tiebreak;
            stream_options.deadband_pct = options.sim.deadband_pct;
            const StreamResult sim = simulate_stream(*series, quarter_signals, config->params, stream_options);
            for (const TradeResult& t : sim.trades)
                result.trades.push_back({t, weights[i], step.trading});
        }
    };
    trade_book(books.long_book, result.long_weights, DirectionPolicy::LongOnly);
    trade_book(books.short_book, result.short_weights, DirectionPolicy::ShortOnly);
    return result;
}

namespace {

RiskSummary summarize(const DailySeries& stream, std::span<const WeightedTrade* const> trades) {
    RiskSummary summary;
    if (!stream.dates.empty()) {
        const PnlSeries pnl = to_pnl(stream);
        summary.final_cum_return_pct = pnl.cum_pnl.back();
        summary.peak_cum_return_pct = pnl.hwm.back();
        summary.mdd_pct = max_drawdown(pnl);
        summary.ann_sharpe = ann_sharpe(pnl.daily_return_pct);
    }
    long wins = 0;
    long holding_sum = 0;
    for (const WeightedTrade* t : trades) {
        ++summary.n_trades;
        if (t->trade.trade_return > 0.0) ++wins;
        holding_sum += t->trade.realized_holding;
        summary.max_holding = std::max(summary.max_holding, t->trade.realized_holding);
    }
    if (summary.n_trades > 0) {
        summary.win_rate_pct = 100.0 * static_cast<double>(wins) / static_cast<double>(summary.n_trades);
        summary.mean_holding = static_cast<double>(holding_sum) / static_cast<double>(summary.n_trades);
    }
    return summary;
}

DailySeries restrict(const DailySeries& stream, Date first, Date last) {
    DailySeries out;
    for (size_t i = 0; i < stream.dates.size(); ++i) {
        if (stream.dates[i] < first || stream.dates[i] > last) continue;
        out.dates.push_back(stream.dates[i]);
        out.values.push_back(stream.values[i]);
    }
    return out;
}

} // namespace

PortfolioRun run_walk_forward(const PortfolioInputs& inputs, const RebalanceSchedule& schedule,
                              const PortfolioOptions& options) {
    if (!inputs.signals || !inputs.calendar) throw ComputeError("portfolio inputs incomplete");
    if (schedule.steps.empty()) throw ComputeError("empty rebalance schedule");

    PortfolioRun run;
    run.schedule = schedule;
    run.regime_split = options.regime_split;

    // Calibration + selection + trading, step by step. Per-ticker
    // calibration metrics within a step run in parallel.
    for (const RebalanceStep& step : schedule.steps) {
        std::vector<CalibrationRecord> records(inputs.configs.size());
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (size_t i = next.fetch_add(1); i < inputs.configs.size(); i = next.fetch_add(1)) {
                const OptimalConfig& config = inputs.configs[i];
                const PriceSeries* series = nullptr;
                for (const PriceSeries& s : inputs.prices)
                    if (s.ticker() == config.ticker) {
                        series = &s;
                        break;
                    }
                if (!series) continue;
                records[i] = calibration_metrics(*series, step.calibration_start(), step.calibration_end(), config,
                                                 *inputs.signals, inputs.benchmark, options.sim);
            }
        };
        const int workers = std::max(1, options.workers);
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }

        const BookSelection books = select_book(records, options.rule);
        StepResult step_result = run_step(inputs, step, books, options);
        for (const auto& d : books.diagnostics)
            step_result.diagnostics.push_back(step.trading.to_string() + ": " + d);
        run.steps.push_back(std::move(step_result));
    }

    // Stream axis: calendar sessions from the first traded day through the
    // last trade exit (quarter-end trades may spill past the last quarter).
    Date axis_first = schedule.steps.front().trading_start();
    Date axis_last = schedule.steps.back().trading_end();
    for (const StepResult& s : run.steps)
        for (const WeightedTrade& wt : s.trades) axis_last = std::max(axis_last, wt.trade.exit_date);

    std::vector<Date> axis;
    for (Date d : inputs.calendar->sessions())
        if (d >= axis_first && d <= axis_last) axis.push_back(d);

    auto build_stream = [&](DirectionPolicy side) {
        DailySeries stream;
        stream.dates = axis;
        stream.values.assign(axis.size(), 0.0);
        for (const StepResult& s : run.steps) {
            for (const WeightedTrade& wt : s.trades) {
                const bool is_long = wt.trade.direction > 0;
                if ((side == DirectionPolicy::LongOnly) != is_long) continue;
                auto it = std::lower_bound(axis.begin(), axis.end(), wt.trade.exit_date);
                if (it != axis.end() && *it == wt.trade.exit_date)
                    stream.values[static_cast<size_t>(it - axis.begin())] += wt.trade.trade_return * 100.0 * wt.weight;
            }
        }
        return stream;
    };
    run.long_stream = build_stream(DirectionPolicy::LongOnly);
    run.short_stream = build_stream(DirectionPolicy::ShortOnly);

    run.combined_stream = add(run.long_stream, run.short_stream);
    if (options.combine == CombineMode::Average) run.combined_stream = scale(run.combined_stream, 0.5);

    std::vector<const WeightedTrade*> long_trades, short_trades, all_trades;
    for (const StepResult& s : run.steps) {
        for (const WeightedTrade& wt : s.trades) {
            (wt.trade.direction > 0 ? long_trades : short_trades).push_back(&wt);
            all_trades.push_back(&wt);
        }
    }
    run.long_summary = summarize(run.long_stream, long_trades);
    run.short_summary = summarize(run.short_stream, short_trades);
    run.combined_summary = summarize(run.combined_stream, all_trades);

    if (options.leverage.multiplier > 1.0) {
        std::vector<Date> active_dates;
        if (options.leverage.accrual == AccrualMode::PerPosition) {
            // Sessions with at least one open position, entry through exit.
            std::set<Date> active;
            for (const WeightedTrade* wt : all_trades) {
                auto lo = std::lower_bound(axis.begin(), axis.end(), wt->trade.entry_date);
                auto hi = std::upper_bound(axis.begin(), axis.end(), wt->trade.exit_date);
                active.insert(lo, hi);
            }
            active_dates.assign(active.begin(), active.end());
        }
        run.levered_stream = apply_leverage(run.combined_stream, options.leverage, options.sim.periods_per_year,
                                            active_dates);
        run.levered_summary = summarize(*run.levered_stream, all_trades);
    }

    if (inputs.benchmark) {
        // Benchmark close-to-close percent returns aligned on the axis.
        std::vector<double> strat, bench;
        const auto bars = inputs.benchmark->bars();
        for (size_t i = 1; i < bars.size(); ++i) {
            const Date d = bars[i].date;
            auto it = std::lower_bound(axis.begin(), axis.end(), d);
            if (it == axis.end() || *it != d) continue;
            strat.push_back(run.combined_stream.values[static_cast<size_t>(it - axis.begin())]);
            bench.push_back((bars[i].close / bars[i - 1].close - 1.0) * 100.0);
        }
        run.combined_summary.correlation_to_benchmark = correlation(strat, bench);
    }

    // Regime split on the combined stream; trades split by exit date.
    if (!axis.empty()) {
        std::vector<const WeightedTrade*> before, after;
        for (const WeightedTrade* wt : all_trades)
            (wt->trade.exit_date < options.regime_split ? before : after).push_back(wt);
        const DailySeries pre = restrict(run.combined_stream, axis.front(), options.regime_split.plus_days(-1));
        const DailySeries post = restrict(run.combined_stream, options.regime_split, axis.back());
        if (!pre.dates.empty()) run.before_split = summarize(pre, before);
        if (!post.dates.empty()) run.after_split = summarize(post, after);
    }

    for (const StepResult& s : run.steps)
        for (const auto& d : s.diagnostics) run.diagnostics.push_back(d);
    return run;
}

TurnoverGrid turnover_grid(const PortfolioRun& run, DirectionPolicy side) {
    TurnoverGrid grid;
    grid.side = side;
    for (const StepResult& s : run.steps) {
        grid.quarters.push_back(s.step.trading);
        grid.top_n = std::max(grid.top_n, static_cast<int>(
                                              (side == DirectionPolicy::LongOnly ? s.long_book : s.short_book)
                                                  .tickers.size()));
    }
    grid.cells.assign(static_cast<size_t>(grid.top_n), std::vector<std::string>(run.steps.size()));
    for (size_t q = 0; q < run.steps.size(); ++q) {
        const Book& book =
            side == DirectionPolicy::LongOnly ? run.steps[q].long_book : run.steps[q].short_book;
        for (size_t r = 0; r < book.tickers.size(); ++r) grid.cells[r][q] = book.tickers[r];
    }
    return grid;
}

} // namespace sigsim
