#pragma once

#include "sigsim/dates.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigsim {

// One daily OHLC observation. Prices are strictly positive and satisfy
// low <= min(open, close), high >= max(open, close).
struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::optional<double> volume;

    bool valid() const {
        const bool positive = open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0;
        const bool ordered = low <= open && low <= close && high >= open && high >= close;
        const bool vol_ok = !volume || *volume >= 0.0;
        return positive && ordered && vol_ok;
    }
};

// Immutable per-ticker daily series, dates strictly increasing.
class PriceSeries {
public:
    PriceSeries() = default;
    PriceSeries(std::string ticker, std::vector<Bar> bars);

    const std::string& ticker() const { return ticker_; }
    std::span<const Bar> bars() const { return bars_; }
    size_t size() const { return bars_.size(); }
    bool empty() const { return bars_.empty(); }
    const Bar& bar(size_t i) const { return bars_[i]; }

    Date first_date() const { return bars_.front().date; }
    Date last_date() const { return bars_.back().date; }

    // Index of the bar on exactly `d`, if present.
    std::optional<size_t> index_of(Date d) const;
    // Index of the first bar strictly after `d` (the entry session for a
    // signal created on `d`), if any.
    std::optional<size_t> first_index_after(Date d) const;

    // Copy restricted to bars with first <= date <= last.
    PriceSeries between(Date first, Date last) const;
    PriceSeries up_to(Date last) const;

private:
    std::string ticker_;
    std::vector<Bar> bars_;
};

// The benchmark index series shares the equity schema.
using BenchmarkSeries = PriceSeries;

// Sorted union of all ingested bar dates.
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Date> sessions);

    std::span<const Date> sessions() const { return sessions_; }
    size_t size() const { return sessions_.size(); }
    bool empty() const { return sessions_.empty(); }
    bool contains(Date d) const;
    std::optional<size_t> index_of(Date d) const;

    // Smallest session strictly greater than `day`; throws ComputeError when
    // `day` is at or beyond the last session.
    Date next_session(Date day) const;
    std::optional<Date> try_next_session(Date day) const;

    // Index of the first session >= d / last session <= d.
    std::optional<size_t> lower_bound_index(Date d) const;
    std::optional<size_t> last_index_at_or_before(Date d) const;

private:
    std::vector<Date> sessions_;
};

Date next_session(const TradingCalendar& calendar, Date day);

struct RowDiagnostic {
    size_t line = 0;
    std::string ticker;
    std::string message;
};

struct IngestResult {
    std::vector<PriceSeries> series; // sorted by ticker
    TradingCalendar calendar;
    std::vector<RowDiagnostic> rejected;

    const PriceSeries* find(const std::string& ticker) const;
};

// Parse a delimited price file (columns ticker,date,open,high,low,close
// [,volume]). Rows violating Bar invariants are rejected with row-level
// diagnostics; a duplicate (ticker, date) throws InputError.
IngestResult ingest_prices(const std::string& path);

// Simple holding-period return: close h sessions after entry over the entry
// open, minus one. Entry is the ticker's first bar strictly after
// `signal_day`. Sessions are counted on the ticker's own bar sequence.
double holding_return(const PriceSeries& series, Date signal_day, int h);
std::optional<double> try_holding_return(const PriceSeries& series, Date signal_day, int h);

} // namespace sigsim
