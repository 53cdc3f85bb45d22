#pragma once

#include "sigsim/market_data.hpp"
#include "sigsim/signals.hpp"

#include <cstdint>
#include <vector>

namespace sigsim {

// Synthetic-signal generator settings. Output is a pure function of the
// seed; per-ticker sub-seeds are derived from (seed, ticker).
struct GeneratorSpec {
    double target_accuracy = 0.5;        // probability a direction matches the realized sign
    std::vector<int> horizons = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    uint64_t seed = 0;
    double flat_share = 0.0;             // probability a record is Flat (forecast 0)
    double magnitude_lo_pct = 0.2;       // |forecast| drawn uniformly from this range
    double magnitude_hi_pct = 3.6;
    int creation_minute = 21 * 60 + 30;  // after the close, before next open
};

// Coin-flip directions, independent of prices: the 50% null model. One
// creation event per session of `calendar` in [first, last] whose next
// `max(horizons)` sessions exist, one record per horizon. Records pass
// leakage_check by construction.
std::vector<SignalRecord> random_signals(const PriceSeries& prices, const TradingCalendar& calendar, Date first,
                                         Date last, const GeneratorSpec& spec);

// Directions that match the realized sign at each record's own horizon with
// probability target_accuracy; an undefined sign (zero or unavailable
// return) falls back to a fair coin.
std::vector<SignalRecord> calibrated_signals(const PriceSeries& prices, const TradingCalendar& calendar, Date first,
                                             Date last, const GeneratorSpec& spec);

// Deterministic geometric-random-walk OHLC fixture on a weekday calendar.
// Test and demo plumbing; the price file schema round-trips through
// ingest_prices.
struct PriceWalkSpec {
    uint64_t seed = 0;
    double start_price = 100.0;
    double daily_vol = 0.02;
    double drift = 0.0;
    double intraday_range = 0.01; // high/low spread around open/close
};

PriceSeries random_prices(const std::string& ticker, Date first_day, int n_sessions, const PriceWalkSpec& spec = {});

void write_price_file(const std::string& path, std::span<const PriceSeries> universe,
                      const std::string& header_comment = {});

} // namespace sigsim
