#include "sigsim/stats.hpp"

#include "sigsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sigsim {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace {

// Acklam's inverse normal CDF approximation (~1.15e-9 relative error).
double acklam_quantile(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ComputeError("normal_quantile requires 0 < p < 1");
    double x = acklam_quantile(p);
    // One Halley refinement against the exact CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

std::optional<StatTest> ztest_vs_baseline(double p_hat, long n, double p0, bool two_sided, double ci_level) {
    if (n < 1) return std::nullopt;
    if (!(p0 > 0.0 && p0 < 1.0)) throw ComputeError("baseline proportion must lie strictly in (0, 1)");
    StatTest t;
    t.p_hat = p_hat;
    t.n = n;
    t.p0 = p0;
    t.se0 = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
    t.z = (p_hat - p0) / t.se0;
    t.p_value = two_sided ? 2.0 * (1.0 - normal_cdf(std::fabs(t.z))) : 1.0 - normal_cdf(t.z);
    if (auto ci = wald_ci(p_hat, n, ci_level)) {
        t.ci_lower = ci->lower;
        t.ci_upper = ci->upper;
    }
    return t;
}

std::optional<WaldInterval> wald_ci(double p_hat, long n, double level) {
    if (n < 1) return std::nullopt;
    if (!(level > 0.0 && level < 1.0)) throw ComputeError("confidence level must lie strictly in (0, 1)");
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
    const double zcrit = normal_quantile(0.5 + level / 2.0);
    WaldInterval ci;
    ci.lower = std::clamp(p_hat - zcrit * se, 0.0, 1.0);
    ci.upper = std::clamp(p_hat + zcrit * se, 0.0, 1.0);
    return ci;
}

std::optional<AccuracyCount> directional_accuracy(std::span<const SignalRecord> signals, const PriceSeries& prices,
                                                  Direction side, int h, double deadband_pct) {
    if (side == Direction::Flat) throw ComputeError("accuracy side must be long or short");
    long n = 0;
    long hits = 0;
    for (const auto& signal : signals) {
        if (direction_of(signal.forecast_return_pct, deadband_pct) != side) continue;
        const auto realized = try_holding_return(prices, signal.created_at.date, h);
        if (!realized) continue;
        ++n;
        if (side == Direction::Long ? *realized > 0.0 : *realized < 0.0) ++hits;
    }
    if (n == 0) return std::nullopt;
    return AccuracyCount{100.0 * static_cast<double>(hits) / static_cast<double>(n), n, hits};
}

std::optional<PvalueSummaryRow> pvalue_summary(std::span<const double> p_values, std::string label) {
    if (p_values.empty()) return std::nullopt;
    std::vector<double> sorted(p_values.begin(), p_values.end());
    std::sort(sorted.begin(), sorted.end());

    PvalueSummaryRow row;
    row.label = std::move(label);
    row.n = static_cast<long>(sorted.size());
    const size_t n = sorted.size();
    double sum = 0.0;
    long below1 = 0, below5 = 0, below10 = 0;
    for (double p : sorted) {
        sum += p;
        if (p < 0.01) ++below1;
        if (p < 0.05) ++below5;
        if (p < 0.10) ++below10;
    }
    row.mean = sum / static_cast<double>(n);
    row.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    row.min = sorted.front();
    row.max = sorted.back();
    if (n > 1) {
        double ss = 0.0;
        for (double p : sorted) {
            const double d = p - row.mean;
            ss += d * d;
        }
        row.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    row.pct_below_1 = 100.0 * static_cast<double>(below1) / static_cast<double>(n);
    row.pct_below_5 = 100.0 * static_cast<double>(below5) / static_cast<double>(n);
    row.pct_below_10 = 100.0 * static_cast<double>(below10) / static_cast<double>(n);
    return row;
}

namespace {

void fill_side_stats(const std::array<std::optional<double>, kHoldingPeriods>& acc,
                     std::optional<double>& avg, std::optional<double>& max, std::optional<double>& min,
                     std::optional<int>& best_day) {
    double sum = 0.0;
    int defined = 0;
    for (int h = 0; h < kHoldingPeriods; ++h) {
        if (!acc[static_cast<size_t>(h)]) continue;
        const double a = *acc[static_cast<size_t>(h)];
        sum += a;
        ++defined;
        if (!max || a > *max) {
            max = a;
            best_day = h;
        }
        if (!min || a < *min) min = a;
    }
    if (defined > 0) avg = sum / defined;
}

} // namespace

AccuracyTable accuracy_table(std::span<const PriceSeries> universe, const SignalSet& signals,
                             const std::vector<std::pair<std::string, TickerStrategy>>& strategies,
                             const AccuracyTableOptions& options) {
    AccuracyTable table;
    for (const PriceSeries& prices : universe) {
        const auto ticker_signals = signals.for_ticker(prices.ticker());
        if (ticker_signals.empty()) {
            table.omitted.push_back(prices.ticker());
            continue;
        }

        AccuracyRow row;
        row.ticker = prices.ticker();

        long n_long = 0, n_short = 0, n_total = 0;
        for (const auto& s : ticker_signals) {
            ++n_total;
            switch (direction_of(s.forecast_return_pct, options.deadband_pct)) {
                case Direction::Long: ++n_long; break;
                case Direction::Short: ++n_short; break;
                case Direction::Flat: break;
            }
        }
        row.n_long = n_long;
        row.n_short = n_short;
        row.pct_long = n_total ? 100.0 * static_cast<double>(n_long) / static_cast<double>(n_total) : 0.0;
        row.pct_short = n_total ? 100.0 * static_cast<double>(n_short) / static_cast<double>(n_total) : 0.0;

        for (int h = 0; h < kHoldingPeriods; ++h) {
            if (auto a = directional_accuracy(ticker_signals, prices, Direction::Long, h, options.deadband_pct))
                row.long_acc_pct[static_cast<size_t>(h)] = a->accuracy_pct;
            if (auto a = directional_accuracy(ticker_signals, prices, Direction::Short, h, options.deadband_pct))
                row.short_acc_pct[static_cast<size_t>(h)] = a->accuracy_pct;
        }
        fill_side_stats(row.long_acc_pct, row.avg_long, row.max_long, row.min_long, row.best_day_long);
        fill_side_stats(row.short_acc_pct, row.avg_short, row.max_short, row.min_short, row.best_day_short);

        // Significance test at the optimal strategy when one is supplied;
        // otherwise at the stronger side's best day over all horizons.
        TickerStrategy strategy;
        bool have_strategy = false;
        for (const auto& [ticker, s] : strategies) {
            if (ticker == row.ticker) {
                strategy = s;
                have_strategy = true;
                break;
            }
        }
        if (!have_strategy) {
            const double best_long = row.max_long.value_or(-1.0);
            const double best_short = row.max_short.value_or(-1.0);
            strategy.side = best_long >= best_short ? Direction::Long : Direction::Short;
        }

        auto side_test = [&](Direction side, std::span<const SignalRecord> view,
                             int& best_h_out) -> std::optional<StatTest> {
            std::optional<AccuracyCount> best;
            for (int h = 0; h < kHoldingPeriods; ++h) {
                auto a = directional_accuracy(view, prices, side, h, options.deadband_pct);
                if (a && (!best || a->accuracy_pct > best->accuracy_pct)) {
                    best = a;
                    best_h_out = h;
                }
            }
            if (!best) return std::nullopt;
            return ztest_vs_baseline(best->accuracy_pct / 100.0, best->n, options.baseline_p0, options.two_sided,
                                     options.ci_level);
        };

        // The period-signal filter applies to the configured side only.
        std::span<const SignalRecord> long_view = ticker_signals;
        std::span<const SignalRecord> short_view = ticker_signals;
        if (strategy.period_signal) {
            const auto filtered = signals.for_ticker_horizon(row.ticker, *strategy.period_signal);
            (strategy.side == Direction::Short ? short_view : long_view) = filtered;
        }
        int long_h = 0, short_h = 0;
        row.long_test = side_test(Direction::Long, long_view, long_h);
        row.short_test = side_test(Direction::Short, short_view, short_h);
        if (strategy.side == Direction::Short) {
            row.test = row.short_test;
            row.test_h = short_h;
        } else {
            row.test = row.long_test;
            row.test_h = long_h;
        }
        row.test_side = strategy.side;
        row.test_horizon = strategy.period_signal;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<CiPlotRow> ci_plot_data(std::span<const AccuracyRow> rows, Direction side, double level) {
    struct Entry {
        const AccuracyRow* row;
        double accuracy;
        long n;
    };
    std::vector<Entry> entries;
    for (const AccuracyRow& row : rows) {
        const auto& max_acc = side == Direction::Long ? row.max_long : row.max_short;
        if (!max_acc) continue;
        const long n = side == Direction::Long ? row.n_long : row.n_short;
        entries.push_back({&row, *max_acc, n});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.accuracy != b.accuracy) return a.accuracy < b.accuracy;
        return a.row->ticker < b.row->ticker;
    });

    std::vector<CiPlotRow> out;
    out.reserve(entries.size());
    int rank = 1;
    for (const Entry& e : entries) {
        CiPlotRow r;
        r.rank = rank++;
        r.ticker = e.row->ticker;
        r.accuracy_pct = e.accuracy;
        r.n = e.n;
        if (auto ci = wald_ci(e.accuracy / 100.0, e.n, level)) {
            r.ci_lower_pct = ci->lower * 100.0;
            r.ci_upper_pct = ci->upper * 100.0;
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace sigsim
