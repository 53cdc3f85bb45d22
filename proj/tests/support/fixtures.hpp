#pragma once

#include "sigsim/market_data.hpp"
#include "sigsim/rng.hpp"
#include "sigsim/signals.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace fixtures {

struct BarSpec {
    const char* date;
    double open, high, low, close;
};

inline sigsim::PriceSeries series(const std::string& ticker, std::initializer_list<BarSpec> specs) {
    std::vector<sigsim::Bar> bars;
    for (const auto& s : specs) {
        sigsim::Bar b;
        b.date = sigsim::Date::parse(s.date);
        b.open = s.open;
        b.high = s.high;
        b.low = s.low;
        b.close = s.close;
        bars.push_back(b);
    }
    return sigsim::PriceSeries(ticker, std::move(bars));
}

// n consecutive weekday bars with identical prices.
inline sigsim::PriceSeries flat_series(const std::string& ticker, const char* first_day, int n, double price = 100.0) {
    std::vector<sigsim::Bar> bars;
    sigsim::Date d = sigsim::Date::parse(first_day);
    while (static_cast<int>(bars.size()) < n) {
        if (d.weekday() != 0 && d.weekday() != 6) {
            sigsim::Bar b;
            b.date = d;
            b.open = b.high = b.low = b.close = price;
            bars.push_back(b);
        }
        d = d.plus_days(1);
    }
    return sigsim::PriceSeries(ticker, std::move(bars));
}

// Randomized OHLC path with valid bar invariants; independent of the synth
// module on purpose (oracle-side fixture builder).
inline sigsim::PriceSeries random_series(const std::string& ticker, uint64_t seed, int n,
                                         const char* first_day = "2021-01-04", double vol = 0.03) {
    sigsim::Rng rng(seed);
    std::vector<sigsim::Bar> bars;
    sigsim::Date d = sigsim::Date::parse(first_day);
    double prev_close = 50.0 + 100.0 * rng.next_unit();
    while (static_cast<int>(bars.size()) < n) {
        if (d.weekday() != 0 && d.weekday() != 6) {
            sigsim::Bar b;
            b.date = d;
            b.open = prev_close * (1.0 + vol * (rng.next_unit() - 0.5));
            b.close = b.open * (1.0 + 2.0 * vol * (rng.next_unit() - 0.5));
            const double top = std::max(b.open, b.close);
            const double bottom = std::min(b.open, b.close);
            b.high = top * (1.0 + vol * rng.next_unit());
            b.low = bottom * (1.0 - vol * rng.next_unit());
            bars.push_back(b);
            prev_close = b.close;
        }
        d = d.plus_days(1);
    }
    return sigsim::PriceSeries(ticker, std::move(bars));
}

inline sigsim::TradingCalendar calendar_of(const sigsim::PriceSeries& series) {
    std::vector<sigsim::Date> dates;
    for (const auto& b : series.bars()) dates.push_back(b.date);
    return sigsim::TradingCalendar(std::move(dates));
}

inline sigsim::SignalRecord signal(const std::string& ticker, const char* created_day, double forecast_pct,
                                   int horizon, const char* target_day, int minute = 21 * 60 + 30) {
    sigsim::SignalRecord r;
    r.created_at = sigsim::DateTime{sigsim::Date::parse(created_day), minute};
    r.ticker = ticker;
    r.target_date = sigsim::Date::parse(target_day);
    r.forecast_return_pct = forecast_pct;
    r.horizon = horizon;
    return r;
}

// Signal created on the bar at `bar_index`, targeting `horizon` bars later.
inline sigsim::SignalRecord signal_at(const sigsim::PriceSeries& series, size_t bar_index, double forecast_pct,
                                      int horizon = 1) {
    sigsim::SignalRecord r;
    r.created_at = sigsim::DateTime{series.bar(bar_index).date, 21 * 60 + 30};
    r.ticker = series.ticker();
    r.target_date = series.bar(std::min(bar_index + static_cast<size_t>(horizon), series.size() - 1)).date;
    r.forecast_return_pct = forecast_pct;
    r.horizon = horizon;
    return r;
}

} // namespace fixtures
