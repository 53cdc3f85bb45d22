#include "sigsim/perf.hpp"

#include "sigsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sigsim {

namespace {

struct Moments {
    double mean = 0.0;
    double sample_stddev = 0.0; // n-1
    size_t n = 0;
};

Moments moments(std::span<const double> xs) {
    Moments m;
    m.n = xs.size();
    if (m.n == 0) return m;
    double sum = 0.0;
    bool all_equal = true;
    for (double x : xs) {
        sum += x;
        all_equal = all_equal && x == xs[0];
    }
    m.mean = sum / static_cast<double>(m.n);
    if (m.n < 2 || all_equal) return m; // constant series: variance is exactly 0
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        ss += d * d;
    }
    m.sample_stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
    return m;
}

} // namespace

PnlSeries cum_pnl(std::vector<Date> dates, std::vector<double> daily_return_pct) {
    if (dates.size() != daily_return_pct.size()) throw ComputeError("cum_pnl: date/value length mismatch");
    for (size_t i = 0; i + 1 < dates.size(); ++i)
        if (!(dates[i] < dates[i + 1])) throw ComputeError("cum_pnl: dates not strictly increasing");

    PnlSeries out;
    out.dates = std::move(dates);
    out.daily_return_pct = std::move(daily_return_pct);
    const size_t n = out.daily_return_pct.size();
    out.cum_pnl.resize(n);
    out.hwm.resize(n);
    out.drawdown.resize(n);
    double running = 0.0;
    double peak = 0.0;
    for (size_t i = 0; i < n; ++i) {
        running += out.daily_return_pct[i];
        peak = std::max(i == 0 ? running : peak, running);
        out.cum_pnl[i] = running;
        out.hwm[i] = peak;
        out.drawdown[i] = peak - running;
    }
    return out;
}

double max_drawdown(const PnlSeries& series) {
    double worst = 0.0;
    for (double d : series.drawdown) worst = std::max(worst, d);
    return worst;
}

std::optional<double> ann_sharpe(std::span<const double> daily_return_pct, double rf_annual_pct,
                                 int periods_per_year) {
    const Moments m = moments(daily_return_pct);
    if (m.n < 2 || m.sample_stddev == 0.0) return std::nullopt;
    const double rf_daily = rf_annual_pct / static_cast<double>(periods_per_year);
    return (m.mean - rf_daily) / m.sample_stddev * std::sqrt(static_cast<double>(periods_per_year));
}

std::vector<std::optional<double>> rolling_sharpe(std::span<const double> daily_return_pct, int window,
                                                  double rf_annual_pct, int periods_per_year) {
    if (window < 2) throw ComputeError("rolling window must be >= 2");
    std::vector<std::optional<double>> out(daily_return_pct.size());
    const size_t w = static_cast<size_t>(window);
    for (size_t i = w; i <= daily_return_pct.size(); ++i)
        out[i - 1] = ann_sharpe(daily_return_pct.subspan(i - w, w), rf_annual_pct, periods_per_year);
    return out;
}

std::optional<double> correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ComputeError("correlation: length mismatch");
    const size_t n = a.size();
    if (n < 2) return std::nullopt;
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    bool a_const = true, b_const = true;
    for (size_t i = 1; i < n; ++i) {
        a_const = a_const && a[i] == a[0];
        b_const = b_const && b[i] == b[0];
    }
    if (a_const || b_const) return std::nullopt;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

std::vector<std::optional<double>> rolling_corr(std::span<const double> a, std::span<const double> b, int window) {
    if (a.size() != b.size()) throw ComputeError("rolling_corr: length mismatch");
    if (window < 2) throw ComputeError("rolling window must be >= 2");
    std::vector<std::optional<double>> out(a.size());
    const size_t w = static_cast<size_t>(window);
    for (size_t i = w; i <= a.size(); ++i)
        out[i - 1] = correlation(a.subspan(i - w, w), b.subspan(i - w, w));
    return out;
}

std::optional<double> beta(std::span<const double> stock_daily, std::span<const double> benchmark_daily) {
    if (stock_daily.size() != benchmark_daily.size()) throw ComputeError("beta: length mismatch");
    const size_t n = stock_daily.size();
    if (n < 2) return std::nullopt;
    double ms = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ms += stock_daily[i];
        mb += benchmark_daily[i];
    }
    ms /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    bool bench_const = true;
    for (size_t i = 1; i < n; ++i) bench_const = bench_const && benchmark_daily[i] == benchmark_daily[0];
    if (bench_const) return std::nullopt;
    double cov = 0.0, var_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double db = benchmark_daily[i] - mb;
        cov += (stock_daily[i] - ms) * db;
        var_b += db * db;
    }
    if (var_b == 0.0) return std::nullopt;
    return cov / var_b;
}

SortinoResult sortino_and_downside(std::span<const double> daily_return_pct, double target, int periods_per_year) {
    SortinoResult result;
    const size_t n = daily_return_pct.size();
    if (n < 2) return result;
    double mean_excess = 0.0;
    double downside_ss = 0.0;
    bool any_below = false;
    for (double r : daily_return_pct) {
        const double excess = r - target;
        mean_excess += excess;
        if (excess < 0.0) {
            downside_ss += excess * excess;
            any_below = true;
        }
    }
    mean_excess /= static_cast<double>(n);
    result.downside_deviation = std::sqrt(downside_ss / static_cast<double>(n));
    if (any_below && result.downside_deviation > 0.0)
        result.sortino = mean_excess / result.downside_deviation * std::sqrt(static_cast<double>(periods_per_year));
    return result;
}

namespace {

TradeAggregateRow aggregate_rows(std::span<const TradeResult* const> trades, std::span<const Date> sessions) {
    TradeAggregateRow row;
    row.n_trades = static_cast<long>(trades.size());
    if (trades.empty()) return row;

    long wins = 0;
    long holding_sum = 0;
    for (const TradeResult* t : trades) {
        if (t->trade_return > 0.0) ++wins;
        holding_sum += t->realized_holding;
        row.max_holding = std::max(row.max_holding, t->realized_holding);
        row.cum_return_pct += t->trade_return * 100.0;
    }
    row.win_rate_pct = 100.0 * static_cast<double>(wins) / static_cast<double>(trades.size());
    row.mean_holding = static_cast<double>(holding_sum) / static_cast<double>(trades.size());

    if (!sessions.empty()) {
        std::vector<double> daily(sessions.size(), 0.0);
        for (const TradeResult* t : trades) {
            auto it = std::lower_bound(sessions.begin(), sessions.end(), t->exit_date);
            if (it != sessions.end() && *it == t->exit_date)
                daily[static_cast<size_t>(it - sessions.begin())] += t->trade_return * 100.0;
        }
        PnlSeries pnl = cum_pnl(std::vector<Date>(sessions.begin(), sessions.end()), std::move(daily));
        row.mdd_pct = max_drawdown(pnl);
        row.sharpe = ann_sharpe(pnl.daily_return_pct);
    }
    return row;
}

} // namespace

TradeAggregates trade_aggregates(std::span<const TradeResult> trades, std::span<const Date> sessions) {
    std::vector<const TradeResult*> longs, shorts, all;
    all.reserve(trades.size());
    for (const TradeResult& t : trades) {
        all.push_back(&t);
        (t.direction > 0 ? longs : shorts).push_back(&t);
    }
    TradeAggregates agg;
    agg.long_side = aggregate_rows(longs, sessions);
    agg.short_side = aggregate_rows(shorts, sessions);
    agg.combined = aggregate_rows(all, sessions);
    return agg;
}

double DailySeries::final_sum() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
}

DailySeries add(const DailySeries& a, const DailySeries& b) {
    DailySeries out;
    out.dates.reserve(a.dates.size() + b.dates.size());
    out.values.reserve(a.dates.size() + b.dates.size());
    size_t i = 0, j = 0;
    while (i < a.dates.size() || j < b.dates.size()) {
        if (j == b.dates.size() || (i < a.dates.size() && a.dates[i] < b.dates[j])) {
            out.dates.push_back(a.dates[i]);
            out.values.push_back(a.values[i]);
            ++i;
        } else if (i == a.dates.size() || b.dates[j] < a.dates[i]) {
            out.dates.push_back(b.dates[j]);
            out.values.push_back(b.values[j]);
            ++j;
        } else {
            out.dates.push_back(a.dates[i]);
            out.values.push_back(a.values[i] + b.values[j]);
            ++i;
            ++j;
        }
    }
    return out;
}

DailySeries scale(const DailySeries& s, double factor) {
    DailySeries out = s;
    for (double& v : out.values) v *= factor;
    return out;
}

PnlSeries to_pnl(const DailySeries& s) {
    return cum_pnl(s.dates, s.values);
}

} // namespace sigsim
