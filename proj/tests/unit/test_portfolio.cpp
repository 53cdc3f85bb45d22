#include "sigsim/portfolio.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/rng.hpp"
#include "sigsim/synth.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace sigsim;

namespace {

TradingCalendar weekday_calendar(const char* first, const char* last) {
    std::vector<Date> sessions;
    for (Date d = Date::parse(first); d <= Date::parse(last); d = d.plus_days(1))
        if (d.weekday() != 0 && d.weekday() != 6) sessions.push_back(d);
    return TradingCalendar(std::move(sessions));
}

OptimalConfig config_for(const std::string& ticker, DirectionPolicy strategy, int horizon, int mhp, double pt,
                         double sl) {
    OptimalConfig c;
    c.ticker = ticker;
    c.strategy = strategy;
    c.period_signal = horizon;
    c.params = ExecParams{mhp, pt, sl};
    c.window_start = Date::parse("2021-01-01");
    c.window_end = Date::parse("2022-12-31");
    return c;
}

CalibrationRecord record_for(const std::string& ticker, DirectionPolicy side, std::optional<double> sharpe,
                             double mdd, long n_obs, std::optional<double> beta = std::nullopt) {
    CalibrationRecord r;
    r.ticker = ticker;
    r.side = side;
    r.sharpe = sharpe;
    r.mdd_pct = mdd;
    r.n_observations = n_obs;
    r.beta = beta;
    return r;
}

} // namespace

TEST_CASE("schedule reproduces the quarterly walk-forward") {
    const TradingCalendar cal = weekday_calendar("2021-07-01", "2025-06-30");
    const RebalanceSchedule schedule = build_schedule(cal, Quarter{2021, 3}, Quarter{2025, 2});
    REQUIRE(schedule.steps.size() == 10);
    CHECK(schedule.steps.front().calibration_first == Quarter{2021, 3});
    CHECK(schedule.steps.front().calibration_last == Quarter{2022, 4});
    CHECK(schedule.steps.front().trading == Quarter{2023, 1});
    CHECK(schedule.steps.back().trading == Quarter{2025, 2});
    for (size_t i = 0; i + 1 < schedule.steps.size(); ++i) {
        CHECK(schedule.steps[i].trading.next() == schedule.steps[i + 1].trading);
        CHECK(schedule.steps[i].calibration_last < schedule.steps[i].trading);
    }
}

TEST_CASE("schedule edge spans") {
    // Exactly 7 quarters -> a single step.
    const TradingCalendar seven = weekday_calendar("2021-01-01", "2022-09-30");
    const RebalanceSchedule single = build_schedule(seven, Quarter{2021, 1}, Quarter{2022, 3});
    REQUIRE(single.steps.size() == 1);
    CHECK(single.steps[0].trading == Quarter{2022, 3});

    // 9 quarters -> 3 steps with consecutive trading quarters.
    const TradingCalendar nine = weekday_calendar("2021-01-01", "2023-03-31");
    const RebalanceSchedule three = build_schedule(nine, Quarter{2021, 1}, Quarter{2023, 1});
    REQUIRE(three.steps.size() == 3);
    CHECK(three.steps[0].trading == Quarter{2022, 3});
    CHECK(three.steps[1].trading == Quarter{2022, 4});
    CHECK(three.steps[2].trading == Quarter{2023, 1});

    // 6 quarters cannot produce a step.
    const TradingCalendar six = weekday_calendar("2021-01-01", "2022-06-30");
    CHECK_THROWS_AS(build_schedule(six, Quarter{2021, 1}, Quarter{2022, 2}), ComputeError);
}

TEST_CASE("calibration_metrics on flat prices") {
    const auto series = fixtures::flat_series("FLATC", "2021-01-04", 120);
    const OptimalConfig config = config_for("FLATC", DirectionPolicy::LongOnly, 1, 2, 0.05, -0.05);
    std::vector<SignalRecord> records;
    for (size_t i = 0; i < 40; ++i) records.push_back(fixtures::signal_at(series, i * 2, 1.0));
    const SignalSet set{records};
    const CalibrationRecord r = calibration_metrics(series, series.first_date(), series.last_date(), config, set,
                                                    nullptr);
    CHECK_FALSE(r.sharpe.has_value()); // zero variance
    CHECK(r.mdd_pct == 0.0);
    CHECK(r.final_cum_return_pct == 0.0);
    CHECK(r.n_observations > 0);
    CHECK(r.accuracy_pct.has_value());
    CHECK(*r.accuracy_pct == 0.0); // zero returns are misses
}

TEST_CASE("calibration_metrics with zero signals is flagged by n_observations") {
    const auto series = fixtures::flat_series("NOSIG", "2021-01-04", 60);
    const OptimalConfig config = config_for("NOSIG", DirectionPolicy::LongOnly, 1, 2, 0.05, -0.05);
    const CalibrationRecord r =
        calibration_metrics(series, series.first_date(), series.last_date(), config, SignalSet{}, nullptr);
    CHECK(r.n_observations == 0);
    CHECK_FALSE(r.accuracy_pct.has_value());
}

TEST_CASE("calibration_metrics matches a manual recomputation") {
    const auto series = fixtures::random_series("MAN", 808, 150);
    const OptimalConfig config = config_for("MAN", DirectionPolicy::LongOnly, 1, 3, 0.02, -0.03);
    std::vector<SignalRecord> records;
    for (size_t i = 0; i < 60; ++i) records.push_back(fixtures::signal_at(series, i * 2, 1.0));
    const SignalSet set{records};
    const Date wstart = series.bar(10).date;
    const Date wend = series.bar(120).date;
    const CalibrationRecord r = calibration_metrics(series, wstart, wend, config, set, nullptr);

    // Manual: window series, window signals, stream, exit-date attribution.
    const PriceSeries window = series.between(wstart, wend);
    std::vector<SignalRecord> inside;
    for (const auto& s : records)
        if (s.created_at.date >= wstart && s.created_at.date <= wend) inside.push_back(s);
    StreamOptions so;
    so.direction_policy = DirectionPolicy::LongOnly;
    const StreamResult sim = simulate_stream(window, inside, config.params, so);
    double cum = 0.0;
    std::vector<double> daily(window.size(), 0.0);
    for (const auto& t : sim.trades) {
        if (t.exit_reason == ExitReason::Truncated) continue;
        cum += t.trade_return * 100.0;
        daily[*window.index_of(t.exit_date)] += t.trade_return * 100.0;
    }
    CHECK(r.final_cum_return_pct == doctest::Approx(cum).epsilon(1e-12));
    std::vector<Date> dates;
    for (const auto& b : window.bars()) dates.push_back(b.date);
    const PnlSeries pnl = cum_pnl(dates, daily);
    CHECK(r.mdd_pct == doctest::Approx(max_drawdown(pnl)).epsilon(1e-12));
    const auto sharpe = ann_sharpe(pnl.daily_return_pct);
    REQUIRE(r.sharpe.has_value() == sharpe.has_value());
    if (sharpe) CHECK(*r.sharpe == doctest::Approx(*sharpe).epsilon(1e-10));
}

TEST_CASE("calibration beta uses window-restricted aligned returns") {
    const auto bench = fixtures::random_series("BENCH", 4, 200);
    // Stock identical to the benchmark -> beta 1.
    std::vector<Bar> copy(bench.bars().begin(), bench.bars().end());
    const PriceSeries stock("STK", std::move(copy));
    const OptimalConfig config = config_for("STK", DirectionPolicy::LongOnly, 1, 2, 0.05, -0.05);
    const CalibrationRecord r =
        calibration_metrics(stock, stock.first_date(), stock.last_date(), config, SignalSet{}, &bench);
    REQUIRE(r.beta.has_value());
    CHECK(*r.beta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("select_book ranks, filters, and reports shortfalls") {
    SUBCASE("exactly top_n qualifiers all selected") {
        std::vector<CalibrationRecord> records{
            record_for("A", DirectionPolicy::LongOnly, 1.0, 4.0, 100),
            record_for("B", DirectionPolicy::LongOnly, 1.0, 2.0, 100),
            record_for("C", DirectionPolicy::LongOnly, 1.0, 3.0, 100),
        };
        SelectionRule rule;
        rule.min_observations = 10;
        rule.top_n = 3;
        const BookSelection s = select_book(records, rule);
        CHECK(s.long_book.tickers == std::vector<std::string>{"B", "C", "A"}); // mdd ascending
        CHECK(s.short_book.tickers.empty());
    }
    SUBCASE("rank by mdd ascending, top 1") {
        std::vector<CalibrationRecord> records{
            record_for("HIGH", DirectionPolicy::LongOnly, 1.0, 5.0, 100),
            record_for("LOW", DirectionPolicy::LongOnly, 1.0, 2.0, 100),
        };
        SelectionRule rule;
        rule.min_observations = 10;
        rule.top_n = 1;
        const BookSelection s = select_book(records, rule);
        REQUIRE(s.long_book.tickers.size() == 1);
        CHECK(s.long_book.tickers[0] == "LOW");
    }
    SUBCASE("min_observations filter") {
        std::vector<CalibrationRecord> records{
            record_for("THIN", DirectionPolicy::LongOnly, 1.0, 1.0, 5),
            record_for("FAT", DirectionPolicy::LongOnly, 1.0, 2.0, 100),
        };
        SelectionRule rule;
        rule.min_observations = 30;
        rule.top_n = 2;
        const BookSelection s = select_book(records, rule);
        CHECK(s.long_book.tickers == std::vector<std::string>{"FAT"});
        bool mentioned = false;
        for (const auto& d : s.diagnostics)
            if (d.find("THIN") != std::string::npos) mentioned = true;
        CHECK(mentioned);
    }
    SUBCASE("beta filter drops beta above the bound") {
        std::vector<CalibrationRecord> records{
            record_for("HIBETA", DirectionPolicy::LongOnly, 1.0, 1.0, 100, 1.5),
            record_for("LOBETA", DirectionPolicy::LongOnly, 1.0, 2.0, 100, 0.7),
            record_for("NOBETA", DirectionPolicy::LongOnly, 1.0, 3.0, 100),
        };
        SelectionRule rule;
        rule.min_observations = 10;
        rule.top_n = 3;
        rule.beta_filter = BetaFilter{1.0, true};
        const BookSelection s = select_book(records, rule);
        CHECK(s.long_book.tickers == std::vector<std::string>{"LOBETA", "NOBETA"});
    }
    SUBCASE("sharpe filter drops low and undefined sharpe") {
        std::vector<CalibrationRecord> records{
            record_for("GOOD", DirectionPolicy::LongOnly, 1.5, 1.0, 100),
            record_for("WEAK", DirectionPolicy::LongOnly, 0.5, 1.0, 100),
            record_for("NOSR", DirectionPolicy::LongOnly, std::nullopt, 1.0, 100),
        };
        SelectionRule rule;
        rule.min_observations = 10;
        rule.top_n = 3;
        rule.min_sharpe = 1.0;
        const BookSelection s = select_book(records, rule);
        CHECK(s.long_book.tickers == std::vector<std::string>{"GOOD"});
    }
    SUBCASE("both-sided records are eligible on both books") {
        std::vector<CalibrationRecord> records{record_for("BOTH", DirectionPolicy::Both, 1.0, 1.0, 100)};
        SelectionRule rule;
        rule.min_observations = 10;
        rule.top_n = 1;
        const BookSelection s = select_book(records, rule);
        CHECK(s.long_book.tickers == std::vector<std::string>{"BOTH"});
        CHECK(s.short_book.tickers == std::vector<std::string>{"BOTH"});
    }
}

TEST_CASE("select_book equals an independent sort oracle") {
    Rng rng(606);
    std::vector<CalibrationRecord> records;
    for (int i = 0; i < 40; ++i) {
        auto r = record_for("T" + std::to_string(i),
                            rng.bernoulli(0.5) ? DirectionPolicy::LongOnly : DirectionPolicy::ShortOnly,
                            rng.uniform(-1.0, 3.0), rng.uniform(0.5, 9.0), 50 + rng.uniform_int(0, 100));
        records.push_back(r);
    }
    SelectionRule rule;
    rule.min_observations = 60;
    rule.rank_metric = RankMetric::Sharpe; // descending by default
    rule.top_n = 5;
    const BookSelection s = select_book(records, rule);

    std::vector<const CalibrationRecord*> longs;
    for (const auto& r : records)
        if (r.side == DirectionPolicy::LongOnly && r.n_observations >= 60 && r.sharpe) longs.push_back(&r);
    std::sort(longs.begin(), longs.end(), [](const CalibrationRecord* a, const CalibrationRecord* b) {
        if (*a->sharpe != *b->sharpe) return *a->sharpe > *b->sharpe;
        return a->ticker < b->ticker;
    });
    std::vector<std::string> expected;
    for (size_t i = 0; i < std::min<size_t>(5, longs.size()); ++i) expected.push_back(longs[i]->ticker);
    CHECK(s.long_book.tickers == expected);
}

TEST_CASE("book weights") {
    const auto equal = book_weights(4, 4, WeightKind::Equal);
    for (double w : equal) CHECK(w == doctest::Approx(0.25));

    const auto decay = book_weights(4, 4, WeightKind::LinearDecay);
    CHECK(decay[0] == doctest::Approx(0.4));
    CHECK(decay[1] == doctest::Approx(0.3));
    CHECK(decay[2] == doctest::Approx(0.2));
    CHECK(decay[3] == doctest::Approx(0.1));
    for (size_t i = 0; i + 1 < decay.size(); ++i) CHECK(decay[i] > decay[i + 1]);

    // Partial book renormalizes to 1.
    const auto partial = book_weights(3, 20, WeightKind::LinearDecay);
    double sum = 0.0;
    for (double w : partial) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(partial[0] > partial[1]);
}

TEST_CASE("apply_leverage") {
    DailySeries stream;
    Date d = Date::parse("2024-01-01");
    Rng rng(17);
    for (int i = 0; i < 252; ++i) {
        while (d.weekday() == 0 || d.weekday() == 6) d = d.plus_days(1);
        stream.dates.push_back(d);
        stream.values.push_back(0.2 * (rng.next_unit() - 0.4));
        d = d.plus_days(1);
    }
    const double base_final = stream.final_sum();

    SUBCASE("multiplier 1 is the identity") {
        const DailySeries same = apply_leverage(stream, LeverageSpec{1.0, 4.0});
        CHECK(same.values == stream.values);
    }
    SUBCASE("x2 at zero cost doubles everything") {
        const DailySeries doubled = apply_leverage(stream, LeverageSpec{2.0, 0.0});
        for (size_t i = 0; i < stream.values.size(); ++i) CHECK(doubled.values[i] == 2.0 * stream.values[i]);
        CHECK(doubled.final_sum() == doctest::Approx(2.0 * base_final).epsilon(1e-12));
    }
    SUBCASE("x2 at 4% over 252 sessions costs 4 points, day-by-day accrual oracle") {
        const DailySeries levered = apply_leverage(stream, LeverageSpec{2.0, 4.0});
        double expected_final = 0.0;
        for (double v : stream.values) expected_final += 2.0 * v - (2.0 - 1.0) * 4.0 / 252.0;
        CHECK(levered.final_sum() == doctest::Approx(expected_final).epsilon(1e-12));
        CHECK(levered.final_sum() == doctest::Approx(2.0 * base_final - 4.0).epsilon(1e-9));
    }
    SUBCASE("per-position accrual charges only active sessions") {
        std::vector<Date> active(stream.dates.begin(), stream.dates.begin() + 100);
        const DailySeries levered =
            apply_leverage(stream, LeverageSpec{2.0, 4.0, AccrualMode::PerPosition}, 252, active);
        const double expected = 2.0 * base_final - 100.0 * 4.0 / 252.0;
        CHECK(levered.final_sum() == doctest::Approx(expected).epsilon(1e-9));
    }
}

namespace {

// A deterministic three-ticker universe over 2021-01..2022-12 with signals
// on every session at horizon 1; LONGA trends up, SHRTB trends down, CHOPC
// alternates.
struct WalkFixture {
    std::vector<PriceSeries> prices;
    TradingCalendar calendar;
    SignalSet signals;
    std::vector<OptimalConfig> configs;

    PortfolioInputs inputs() const {
        PortfolioInputs in;
        in.prices = prices;
        in.signals = &signals;
        in.configs = configs;
        in.calendar = &calendar;
        return in;
    }
};

WalkFixture make_walk_fixture() {
    WalkFixture fx;
    fx.calendar = weekday_calendar("2021-01-01", "2023-01-31");
    const auto sessions = fx.calendar.sessions();

    auto build = [&](const std::string& ticker, double drift) {
        std::vector<Bar> bars;
        double close = 100.0;
        for (Date day : sessions) {
            Bar b;
            b.date = day;
            b.open = close;
            b.close = close * (1.0 + drift);
            b.high = std::max(b.open, b.close) * 1.001;
            b.low = std::min(b.open, b.close) * 0.999;
            bars.push_back(b);
            close = b.close;
        }
        return PriceSeries(ticker, std::move(bars));
    };
    fx.prices.push_back(build("LONGA", +0.002));
    fx.prices.push_back(build("SHRTB", -0.002));
    fx.prices.push_back(build("CHOPC", 0.0));

    std::vector<SignalRecord> records;
    for (const auto& series : fx.prices) {
        const double sign = series.ticker() == "SHRTB" ? -1.0 : 1.0;
        for (size_t i = 0; i + 1 < series.size(); ++i) {
            SignalRecord r;
            r.created_at = DateTime{series.bar(i).date, 21 * 60 + 30};
            r.ticker = series.ticker();
            r.target_date = series.bar(i + 1).date;
            r.forecast_return_pct = sign;
            r.horizon = 1;
            records.push_back(r);
        }
    }
    fx.signals = SignalSet{records};

    fx.configs.push_back(config_for("LONGA", DirectionPolicy::LongOnly, 1, 2, 0.5, -0.5));
    fx.configs.push_back(config_for("SHRTB", DirectionPolicy::ShortOnly, 1, 2, 0.5, -0.5));
    fx.configs.push_back(config_for("CHOPC", DirectionPolicy::LongOnly, 1, 2, 0.5, -0.5));
    return fx;
}

PortfolioOptions small_options() {
    PortfolioOptions options;
    options.rule.min_observations = 5;
    options.rule.rank_metric = RankMetric::Mdd;
    options.rule.top_n = 2;
    options.workers = 1;
    return options;
}

} // namespace

TEST_CASE("run_step with one name and weight one equals its stream") {
    const WalkFixture fx = make_walk_fixture();
    const RebalanceSchedule schedule = build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    const RebalanceStep step = schedule.steps[0]; // trades 2021Q3

    BookSelection books;
    books.long_book.tickers = {"LONGA"};
    PortfolioOptions options = small_options();
    options.rule.top_n = 1;
    const StepResult result = run_step(fx.inputs(), step, books, options);
    REQUIRE(!result.trades.empty());
    for (const auto& wt : result.trades) CHECK(wt.weight == 1.0);

    // Direct stream over the same quarter signals.
    std::vector<SignalRecord> inside;
    for (const auto& s : fx.signals.for_ticker_horizon("LONGA", 1))
        if (s.created_at.date >= step.trading_start() && s.created_at.date <= step.trading_end())
            inside.push_back(s);
    StreamOptions so;
    so.direction_policy = DirectionPolicy::LongOnly;
    const StreamResult direct = simulate_stream(fx.prices[0], inside, fx.configs[0].params, so);
    REQUIRE(result.trades.size() == direct.trades.size());
    double step_pnl = 0.0, direct_pnl = 0.0;
    for (const auto& wt : result.trades) step_pnl += wt.trade.trade_return * wt.weight;
    for (const auto& t : direct.trades) direct_pnl += t.trade_return;
    CHECK(step_pnl == doctest::Approx(direct_pnl).epsilon(1e-12));
}

TEST_CASE("book with no matching signals contributes zero") {
    const WalkFixture fx = make_walk_fixture();
    const RebalanceSchedule schedule = build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    BookSelection books;
    books.short_book.tickers = {"LONGA"}; // LONGA only emits long signals
    const StepResult result = run_step(fx.inputs(), schedule.steps[0], books, small_options());
    CHECK(result.trades.empty());
}

TEST_CASE("equal-weight leg equals the hand-weighted sum of name streams") {
    // Five flat-price names, one long signal each, controlled exit bumps.
    TradingCalendar cal = weekday_calendar("2021-01-01", "2022-12-31");
    std::vector<PriceSeries> prices;
    std::vector<SignalRecord> records;
    std::vector<OptimalConfig> configs;
    const Date qstart = Quarter{2022, 3}.first_day();
    for (int k = 0; k < 5; ++k) {
        const std::string ticker = "N" + std::to_string(k);
        std::vector<Bar> bars;
        for (Date day : cal.sessions()) {
            Bar b;
            b.date = day;
            b.open = b.high = b.low = b.close = 100.0;
            bars.push_back(b);
        }
        // One +k% close two sessions after the quarter starts.
        const auto entry_idx = *cal.lower_bound_index(qstart) + 1;
        const size_t bump = entry_idx + 2;
        bars[bump].close = 100.0 + k;
        bars[bump].high = std::max(bars[bump].high, bars[bump].close);
        prices.emplace_back(ticker, std::move(bars));

        SignalRecord r;
        r.created_at = DateTime{cal.sessions()[entry_idx - 1], 21 * 60 + 30};
        r.ticker = ticker;
        r.target_date = cal.sessions()[entry_idx];
        r.forecast_return_pct = 1.0;
        r.horizon = 1;
        records.push_back(r);
        configs.push_back(config_for(ticker, DirectionPolicy::LongOnly, 1, 2, 0.5, -0.5));
    }
    SignalSet set{records};
    PortfolioInputs inputs;
    inputs.prices = prices;
    inputs.signals = &set;
    inputs.configs = configs;
    inputs.calendar = &cal;

    const RebalanceSchedule schedule = build_schedule(cal, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    PortfolioOptions options = small_options();
    options.rule.top_n = 5;
    options.rule.min_observations = 0;

    // Hand-select all five names long, run the quarter-3 step.
    BookSelection books;
    for (int k = 0; k < 5; ++k) books.long_book.tickers.push_back("N" + std::to_string(k));
    const RebalanceStep step = schedule.steps[4]; // trades 2022Q3
    REQUIRE(step.trading == Quarter{2022, 3});
    const StepResult result = run_step(inputs, step, books, options);
    REQUIRE(result.trades.size() == 5);

    double leg_pnl = 0.0;
    for (const auto& wt : result.trades) leg_pnl += wt.trade.trade_return * 100.0 * wt.weight;
    // Hand-weighted: each name returns +k% at expiry, weight 0.2.
    double expected = 0.0;
    for (int k = 0; k < 5; ++k) expected += 0.2 * static_cast<double>(k);
    CHECK(leg_pnl == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("walk-forward combines steps additively and splits legs") {
    const WalkFixture fx = make_walk_fixture();
    const RebalanceSchedule schedule = build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    REQUIRE(schedule.steps.size() == 6); // 8 quarters, 2 calibration
    const PortfolioRun run = run_walk_forward(fx.inputs(), schedule, small_options());

    // Combined equals long + short datewise.
    REQUIRE(run.combined_stream.dates.size() == run.long_stream.dates.size());
    for (size_t i = 0; i < run.combined_stream.values.size(); ++i)
        CHECK(run.combined_stream.values[i] ==
              doctest::Approx(run.long_stream.values[i] + run.short_stream.values[i]).epsilon(1e-12));

    // Final cum equals the sum of step PnLs (non-compounded).
    double step_sum = 0.0;
    for (const auto& s : run.steps)
        for (const auto& wt : s.trades) step_sum += wt.trade.trade_return * 100.0 * wt.weight;
    CHECK(run.combined_summary.final_cum_return_pct == doctest::Approx(step_sum).epsilon(1e-9));

    // The trending fixture makes both legs profitable.
    CHECK(run.long_summary.final_cum_return_pct > 0.0);
    CHECK(run.short_summary.final_cum_return_pct > 0.0);
    CHECK(run.long_summary.n_trades > 0);
    CHECK(run.short_summary.n_trades > 0);
}

TEST_CASE("single-step walk-forward equals run_step output") {
    const WalkFixture fx = make_walk_fixture();
    RebalanceSchedule one;
    one.steps = {build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2).steps[0]};
    const PortfolioOptions options = small_options();
    const PortfolioRun run = run_walk_forward(fx.inputs(), one, options);
    REQUIRE(run.steps.size() == 1);
    double run_pnl = 0.0;
    for (const auto& wt : run.steps[0].trades) run_pnl += wt.trade.trade_return * 100.0 * wt.weight;
    CHECK(run.combined_summary.final_cum_return_pct == doctest::Approx(run_pnl).epsilon(1e-9));
}

TEST_CASE("book selection ignores trading-quarter data") {
    const WalkFixture fx = make_walk_fixture();
    const RebalanceSchedule schedule = build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    const PortfolioOptions options = small_options();
    const PortfolioRun base = run_walk_forward(fx.inputs(), schedule, options);

    // Perturb prices inside the first trading quarter only.
    WalkFixture bent = fx;
    std::vector<Bar> bars(bent.prices[0].bars().begin(), bent.prices[0].bars().end());
    const RebalanceStep step0 = schedule.steps[0];
    for (auto& b : bars) {
        if (b.date >= step0.trading_start() && b.date <= step0.trading_end()) {
            b.close *= 1.10;
            b.high = std::max(b.high, b.close);
        }
    }
    bent.prices[0] = PriceSeries("LONGA", std::move(bars));
    const PortfolioRun perturbed = run_walk_forward(bent.inputs(), schedule, options);

    CHECK(perturbed.steps[0].long_book.tickers == base.steps[0].long_book.tickers);
    CHECK(perturbed.steps[0].short_book.tickers == base.steps[0].short_book.tickers);
}

TEST_CASE("turnover grid lays out rank by quarter") {
    const WalkFixture fx = make_walk_fixture();
    const RebalanceSchedule schedule = build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    const PortfolioRun run = run_walk_forward(fx.inputs(), schedule, small_options());
    const TurnoverGrid grid = turnover_grid(run, DirectionPolicy::LongOnly);
    REQUIRE(grid.quarters.size() == run.steps.size());
    REQUIRE(!grid.cells.empty());

    // Columns never contain duplicate tickers.
    for (size_t q = 0; q < grid.quarters.size(); ++q) {
        std::set<std::string> seen;
        for (size_t r = 0; r < grid.cells.size(); ++r) {
            const std::string& cell = grid.cells[r][q];
            if (cell.empty()) continue;
            CHECK(seen.insert(cell).second);
        }
    }
    // The trending long name persists across quarters at rank 1 or 2.
    bool longa_everywhere = true;
    for (size_t q = 0; q < grid.quarters.size(); ++q) {
        bool found = false;
        for (size_t r = 0; r < grid.cells.size(); ++r)
            if (grid.cells[r][q] == "LONGA") found = true;
        longa_everywhere = longa_everywhere && found;
    }
    CHECK(longa_everywhere);
}

TEST_CASE("default regime split is 2025-01-01") {
    CHECK(PortfolioOptions{}.regime_split.to_string() == "2025-01-01");
}

TEST_CASE("walk-forward matches an end-to-end hand computation") {
    // Two flat-priced names. Every quarter each gets exactly one signal whose
    // trade expires two sessions after entry at a hand-placed close: LONGX
    // closes at 101 (long +1%), SHRTY at 99 (short +1%).
    const TradingCalendar cal = weekday_calendar("2021-01-01", "2022-12-31");
    std::vector<Quarter> quarters;
    for (Quarter q{2021, 1}; q <= Quarter{2022, 4}; q = q.next()) quarters.push_back(q);

    std::vector<PriceSeries> prices;
    std::vector<SignalRecord> records;
    std::vector<OptimalConfig> configs;
    for (const bool is_long : {true, false}) {
        const std::string ticker = is_long ? "LONGX" : "SHRTY";
        std::vector<Bar> bars;
        for (Date day : cal.sessions()) {
            Bar b;
            b.date = day;
            b.open = b.high = b.low = b.close = 100.0;
            bars.push_back(b);
        }
        for (const Quarter& q : quarters) {
            const size_t signal_idx = *cal.lower_bound_index(q.first_day()) + 2;
            const size_t exit_idx = signal_idx + 3; // entry at +1, expiry at entry + mhp(2)
            bars[exit_idx].close = is_long ? 101.0 : 99.0;
            bars[exit_idx].high = std::max(bars[exit_idx].high, bars[exit_idx].close);
            bars[exit_idx].low = std::min(bars[exit_idx].low, bars[exit_idx].close);

            SignalRecord r;
            r.created_at = DateTime{cal.sessions()[signal_idx], 21 * 60 + 30};
            r.ticker = ticker;
            r.target_date = cal.sessions()[signal_idx + 1];
            r.forecast_return_pct = is_long ? 1.0 : -1.0;
            r.horizon = 1;
            records.push_back(r);
        }
        prices.emplace_back(ticker, std::move(bars));
        configs.push_back(config_for(ticker, is_long ? DirectionPolicy::LongOnly : DirectionPolicy::ShortOnly, 1, 2,
                                     0.5, -0.5));
    }
    SignalSet set{records};
    PortfolioInputs inputs;
    inputs.prices = prices;
    inputs.signals = &set;
    inputs.configs = configs;
    inputs.calendar = &cal;

    const RebalanceSchedule schedule = build_schedule(cal, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    REQUIRE(schedule.steps.size() == 6); // trading 2021Q3 .. 2022Q4
    PortfolioOptions options;
    options.rule.min_observations = 1;
    options.rule.top_n = 1;
    const PortfolioRun run = run_walk_forward(inputs, schedule, options);

    // Hand computation: one +1% long and one +1% short expiry per trading
    // quarter, weight 1 each, six quarters, summed legs.
    const double one_trade_pct = (101.0 - 100.0) / 100.0 * 100.0;
    CHECK(run.long_summary.n_trades == 6);
    CHECK(run.short_summary.n_trades == 6);
    CHECK(run.long_summary.final_cum_return_pct == doctest::Approx(6.0 * one_trade_pct).epsilon(1e-12));
    CHECK(run.short_summary.final_cum_return_pct == doctest::Approx(6.0 * one_trade_pct).epsilon(1e-12));
    CHECK(run.combined_summary.final_cum_return_pct == doctest::Approx(12.0 * one_trade_pct).epsilon(1e-12));
    CHECK(*run.combined_summary.win_rate_pct == 100.0);
    CHECK(run.combined_summary.mdd_pct == 0.0);
    CHECK(*run.combined_summary.mean_holding == 2.0);
    CHECK(run.combined_summary.max_holding == 2);

    // Book composition is the same pair every quarter.
    for (const StepResult& s : run.steps) {
        CHECK(s.long_book.tickers == std::vector<std::string>{"LONGX"});
        CHECK(s.short_book.tickers == std::vector<std::string>{"SHRTY"});
    }
}

TEST_CASE("walk-forward leverage honors the accrual mode") {
    const WalkFixture fx = make_walk_fixture();
    const RebalanceSchedule schedule = build_schedule(fx.calendar, Quarter{2021, 1}, Quarter{2022, 4}, 2);
    PortfolioOptions whole = small_options();
    whole.leverage = LeverageSpec{2.0, 4.0, AccrualMode::WholeRun};
    PortfolioOptions per_position = small_options();
    per_position.leverage = LeverageSpec{2.0, 4.0, AccrualMode::PerPosition};

    const PortfolioRun base = run_walk_forward(fx.inputs(), schedule, small_options());
    const PortfolioRun levered_whole = run_walk_forward(fx.inputs(), schedule, whole);
    const PortfolioRun levered_pos = run_walk_forward(fx.inputs(), schedule, per_position);
    REQUIRE(levered_whole.levered_summary.has_value());
    REQUIRE(levered_pos.levered_summary.has_value());

    const double n_sessions = static_cast<double>(base.combined_stream.dates.size());
    const double whole_expected =
        2.0 * base.combined_summary.final_cum_return_pct - n_sessions * 4.0 / 252.0;
    CHECK(levered_whole.levered_summary->final_cum_return_pct == doctest::Approx(whole_expected).epsilon(1e-9));
    // The fixture trades every session, so per-position accrual can charge
    // at most as much as whole-run.
    CHECK(levered_pos.levered_summary->final_cum_return_pct >=
          levered_whole.levered_summary->final_cum_return_pct - 1e-12);
}
