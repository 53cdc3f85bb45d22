#include "sigsim/perf.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/rng.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace sigsim;

namespace {

std::vector<Date> weekdays(const char* first, size_t n) {
    std::vector<Date> out;
    Date d = Date::parse(first);
    while (out.size() < n) {
        if (d.weekday() != 0 && d.weekday() != 6) out.push_back(d);
        d = d.plus_days(1);
    }
    return out;
}

std::vector<double> random_returns(uint64_t seed, size_t n, double scale = 1.0) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = scale * (rng.next_unit() - 0.5);
    return out;
}

} // namespace

TEST_CASE("cum_pnl is the running sum with hwm and drawdown") {
    const PnlSeries zero = cum_pnl(weekdays("2024-01-01", 3), {0.0, 0.0, 0.0});
    CHECK(zero.cum_pnl == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(zero.drawdown == std::vector<double>{0.0, 0.0, 0.0});

    const PnlSeries p = cum_pnl(weekdays("2024-01-01", 3), {1.0, -0.5, 2.0});
    CHECK(p.cum_pnl == std::vector<double>{1.0, 0.5, 2.5});
    CHECK(p.hwm == std::vector<double>{1.0, 1.0, 2.5});
    CHECK(p.drawdown[1] == doctest::Approx(0.5));
}

TEST_CASE("cum_pnl matches the prefix-sum oracle") {
    const auto daily = random_returns(11, 500);
    const PnlSeries p = cum_pnl(weekdays("2020-01-01", daily.size()), std::vector<double>(daily));
    const auto expected = oracle::prefix_sums(daily);
    for (size_t i = 0; i < daily.size(); ++i) {
        CHECK(p.cum_pnl[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        CHECK(p.drawdown[i] >= 0.0);
    }
}

TEST_CASE("non-compounded additivity across concatenation") {
    const auto a = random_returns(21, 100);
    const auto b = random_returns(22, 120);
    std::vector<double> both = a;
    both.insert(both.end(), b.begin(), b.end());
    const double fa = cum_pnl(weekdays("2020-01-01", a.size()), std::vector<double>(a)).cum_pnl.back();
    const double fb = cum_pnl(weekdays("2021-01-01", b.size()), std::vector<double>(b)).cum_pnl.back();
    const double fboth = cum_pnl(weekdays("2020-01-01", both.size()), std::vector<double>(both)).cum_pnl.back();
    CHECK(fboth == doctest::Approx(fa + fb).epsilon(1e-12));
}

TEST_CASE("max_drawdown basics") {
    CHECK(max_drawdown(cum_pnl(weekdays("2024-01-01", 4), {1, 2, 3, 4})) == 0.0);
    // cum [0, 10, 4, 12] -> single valley of 6
    CHECK(max_drawdown(cum_pnl(weekdays("2024-01-01", 4), {0, 10, -6, 8})) == doctest::Approx(6.0));
}

TEST_CASE("max_drawdown equals the O(n^2) brute force") {
    for (uint64_t seed = 0; seed < 30; ++seed) {
        const auto daily = random_returns(100 + seed, 200, 2.0);
        const double fast = max_drawdown(cum_pnl(weekdays("2020-01-01", daily.size()), std::vector<double>(daily)));
        CHECK(fast == oracle::max_drawdown_bruteforce(daily));
    }
}

TEST_CASE("max_drawdown shift invariance and scaling") {
    const auto daily = random_returns(55, 300, 3.0);
    auto shifted = daily;
    shifted[0] += 42.0; // constant added to every cum_pnl value
    const auto dates = weekdays("2020-01-01", daily.size());
    const double base = max_drawdown(cum_pnl(dates, std::vector<double>(daily)));
    CHECK(max_drawdown(cum_pnl(dates, std::move(shifted))) == doctest::Approx(base).epsilon(1e-12));

    auto scaled = daily;
    for (auto& v : scaled) v *= 2.0;
    CHECK(max_drawdown(cum_pnl(dates, std::move(scaled))) == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("ann_sharpe basics") {
    CHECK_FALSE(ann_sharpe(std::vector<double>{1.0, 1.0, 1.0}).has_value()); // zero variance
    CHECK_FALSE(ann_sharpe(std::vector<double>{1.0}).has_value());

    const auto daily = random_returns(9, 252);
    auto scaled = daily;
    for (auto& v : scaled) v *= 2.0; // power of two: exact scale invariance
    REQUIRE(ann_sharpe(daily).has_value());
    CHECK(*ann_sharpe(daily) == *ann_sharpe(scaled));

    double expected = 0.0;
    REQUIRE(oracle::sharpe_two_pass(daily, 0.0, 252, expected));
    CHECK(*ann_sharpe(daily) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("ann_sharpe subtracts the per-period risk-free rate") {
    const auto daily = random_returns(12, 100);
    double expected = 0.0;
    REQUIRE(oracle::sharpe_two_pass(daily, 5.0, 252, expected));
    CHECK(*ann_sharpe(daily, 5.0, 252) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("rolling_sharpe fills after the window") {
    const std::vector<double> constant(10, 0.5);
    for (const auto& v : rolling_sharpe(constant, 5)) CHECK_FALSE(v.has_value());

    const auto daily = random_returns(31, 60);
    const auto whole = rolling_sharpe(daily, static_cast<int>(daily.size()));
    for (size_t i = 0; i + 1 < whole.size(); ++i) CHECK_FALSE(whole[i].has_value());
    REQUIRE(whole.back().has_value());
    CHECK(*whole.back() == doctest::Approx(*ann_sharpe(daily)).epsilon(1e-12));

    const auto rolled = rolling_sharpe(daily, 20);
    for (size_t i = 19; i < daily.size(); ++i) {
        std::vector<double> window(daily.begin() + static_cast<long>(i) - 19, daily.begin() + static_cast<long>(i) + 1);
        double expected = 0.0;
        REQUIRE(oracle::sharpe_two_pass(window, 0.0, 252, expected));
        REQUIRE(rolled[i].has_value());
        CHECK(*rolled[i] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("rolling_corr endpoints") {
    const auto a = random_returns(41, 120);
    auto neg = a;
    for (auto& v : neg) v = -v;
    const auto self = rolling_corr(a, a, 30);
    const auto anti = rolling_corr(a, neg, 30);
    for (size_t i = 29; i < a.size(); ++i) {
        REQUIRE(self[i].has_value());
        CHECK(*self[i] == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(anti[i].has_value());
        CHECK(*anti[i] == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("rolling_corr matches the direct covariance oracle") {
    const auto a = random_returns(51, 150);
    const auto b = random_returns(52, 150);
    const auto rolled = rolling_corr(a, b, 40);
    for (size_t i = 39; i < a.size(); ++i) {
        std::vector<double> wa(a.begin() + static_cast<long>(i) - 39, a.begin() + static_cast<long>(i) + 1);
        std::vector<double> wb(b.begin() + static_cast<long>(i) - 39, b.begin() + static_cast<long>(i) + 1);
        double expected = 0.0;
        REQUIRE(oracle::correlation_direct(wa, wb, expected));
        REQUIRE(rolled[i].has_value());
        CHECK(*rolled[i] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("beta basics and regression oracle") {
    const auto bench = random_returns(61, 200);
    CHECK(*beta(bench, bench) == doctest::Approx(1.0).epsilon(1e-12));
    auto doubled = bench;
    for (auto& v : doubled) v *= 2.0;
    CHECK(*beta(doubled, bench) == doctest::Approx(2.0).epsilon(1e-12));

    const auto stock = random_returns(62, 200);
    double slope = 0.0;
    REQUIRE(oracle::regression_slope(stock, bench, slope));
    CHECK(*beta(stock, bench) == doctest::Approx(slope).epsilon(1e-10));

    const std::vector<double> flat(200, 0.25);
    CHECK_FALSE(beta(stock, flat).has_value());
}

TEST_CASE("beta is linear in the stock argument") {
    const auto bench = random_returns(71, 150);
    const auto a1 = random_returns(72, 150);
    const auto a2 = random_returns(73, 150);
    std::vector<double> sum(150);
    for (size_t i = 0; i < sum.size(); ++i) sum[i] = a1[i] + a2[i];
    CHECK(*beta(sum, bench) == doctest::Approx(*beta(a1, bench) + *beta(a2, bench)).epsilon(1e-10));
}

TEST_CASE("sortino and downside deviation") {
    SUBCASE("all positive returns") {
        const SortinoResult r = sortino_and_downside(std::vector<double>{0.5, 1.0, 0.2});
        CHECK(r.downside_deviation == 0.0);
        CHECK_FALSE(r.sortino.has_value());
    }
    SUBCASE("symmetric +/-x") {
        const double x = 0.8;
        std::vector<double> series;
        for (int i = 0; i < 50; ++i) {
            series.push_back(x);
            series.push_back(-x);
        }
        const SortinoResult r = sortino_and_downside(series);
        CHECK(r.downside_deviation == doctest::Approx(x / std::sqrt(2.0)).epsilon(1e-12));
        REQUIRE(r.sortino.has_value());
        CHECK(*r.sortino == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("direct definition oracle") {
        const auto daily = random_returns(81, 300);
        const double target = 0.05;
        const SortinoResult r = sortino_and_downside(daily, target, 252);
        double downside_ss = 0.0;
        double mean_excess = 0.0;
        for (double v : daily) {
            mean_excess += v - target;
            const double below = std::min(v - target, 0.0);
            downside_ss += below * below;
        }
        mean_excess /= static_cast<double>(daily.size());
        const double dd = std::sqrt(downside_ss / static_cast<double>(daily.size()));
        CHECK(r.downside_deviation == doctest::Approx(dd).epsilon(1e-12));
        REQUIRE(r.sortino.has_value());
        CHECK(*r.sortino == doctest::Approx(mean_excess / dd * std::sqrt(252.0)).epsilon(1e-12));
    }
}

namespace {

TradeResult make_trade(const char* entry, const char* exit, double ret, int direction, int holding) {
    TradeResult t;
    t.ticker = "AGG";
    t.direction = direction;
    t.entry_date = Date::parse(entry);
    t.exit_date = Date::parse(exit);
    t.trade_return = ret;
    t.exit_reason = ExitReason::Expiry;
    t.realized_holding = holding;
    return t;
}

} // namespace

TEST_CASE("trade_aggregates splits sides and counts wins") {
    const auto sessions = weekdays("2024-01-01", 10);
    std::vector<TradeResult> trades{
        make_trade("2024-01-01", "2024-01-02", 0.01, +1, 1),
        make_trade("2024-01-02", "2024-01-03", -0.01, +1, 1),
        make_trade("2024-01-03", "2024-01-04", 0.02, +1, 1),
    };
    const TradeAggregates agg = trade_aggregates(trades, sessions);
    CHECK(agg.long_side.n_trades == 3);
    CHECK(*agg.long_side.win_rate_pct == doctest::Approx(100.0 * 2 / 3));
    CHECK(agg.short_side.n_trades == 0);
    CHECK_FALSE(agg.short_side.win_rate_pct.has_value());
    CHECK(agg.combined.cum_return_pct == doctest::Approx(2.0).epsilon(1e-12));

    SUBCASE("all winning longs") {
        std::vector<TradeResult> winners{make_trade("2024-01-01", "2024-01-02", 0.01, +1, 1),
                                         make_trade("2024-01-02", "2024-01-03", 0.03, +1, 2)};
        const TradeAggregates w = trade_aggregates(winners, sessions);
        CHECK(*w.long_side.win_rate_pct == 100.0);
        CHECK(*w.long_side.mean_holding == doctest::Approx(1.5));
        CHECK(w.long_side.max_holding == 2);
    }
}

TEST_CASE("trade_aggregates matches a recount oracle") {
    Rng rng(91);
    const auto sessions = weekdays("2023-01-02", 260);
    std::vector<TradeResult> trades;
    for (int i = 0; i < 200; ++i) {
        const size_t exit = static_cast<size_t>(rng.uniform_int(1, 259));
        TradeResult t;
        t.ticker = "RND";
        t.direction = rng.bernoulli(0.5) ? +1 : -1;
        t.entry_date = sessions[exit - 1];
        t.exit_date = sessions[exit];
        t.trade_return = (rng.next_unit() - 0.5) * 0.1;
        t.realized_holding = rng.uniform_int(0, 10);
        trades.push_back(t);
    }
    const TradeAggregates agg = trade_aggregates(trades, sessions);

    long n_long = 0, long_wins = 0;
    double long_sum = 0.0;
    std::vector<double> long_daily(sessions.size(), 0.0);
    for (const auto& t : trades) {
        if (t.direction != +1) continue;
        ++n_long;
        if (t.trade_return > 0.0) ++long_wins;
        long_sum += t.trade_return * 100.0;
        for (size_t i = 0; i < sessions.size(); ++i)
            if (sessions[i] == t.exit_date) long_daily[i] += t.trade_return * 100.0;
    }
    CHECK(agg.long_side.n_trades == n_long);
    CHECK(*agg.long_side.win_rate_pct == doctest::Approx(100.0 * long_wins / n_long).epsilon(1e-12));
    CHECK(agg.long_side.cum_return_pct == doctest::Approx(long_sum).epsilon(1e-12));
    CHECK(agg.long_side.mdd_pct == doctest::Approx(oracle::max_drawdown_bruteforce(long_daily)).epsilon(1e-12));
    double expected_sharpe = 0.0;
    REQUIRE(oracle::sharpe_two_pass(long_daily, 0.0, 252, expected_sharpe));
    CHECK(*agg.long_side.sharpe == doctest::Approx(expected_sharpe).epsilon(1e-10));
}

TEST_CASE("daily series add and scale") {
    DailySeries a;
    a.dates = weekdays("2024-01-01", 3);
    a.values = {1.0, 2.0, 3.0};
    DailySeries b;
    b.dates = {a.dates[1], a.dates[2], a.dates[2].plus_days(1)};
    b.values = {10.0, 20.0, 30.0};
    const DailySeries sum = add(a, b);
    REQUIRE(sum.dates.size() == 4);
    CHECK(sum.values == std::vector<double>{1.0, 12.0, 23.0, 30.0});
    const DailySeries scaled = scale(sum, 0.5);
    CHECK(scaled.values == std::vector<double>{0.5, 6.0, 11.5, 15.0});
    CHECK(sum.final_sum() == doctest::Approx(66.0));
}
