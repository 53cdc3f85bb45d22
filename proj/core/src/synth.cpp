#include "sigsim/synth.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sigsim {

namespace {

Rng ticker_rng(uint64_t seed, const std::string& ticker) {
    return Rng(fnv1a64(ticker, seed ^ 0x5851f42d4c957f2dULL));
}

void validate_spec(const GeneratorSpec& spec) {
    if (spec.target_accuracy < 0.0 || spec.target_accuracy > 1.0)
        throw ComputeError("target_accuracy must lie in [0, 1]");
    if (spec.flat_share < 0.0 || spec.flat_share > 1.0) throw ComputeError("flat_share must lie in [0, 1]");
    if (spec.horizons.empty()) throw ComputeError("generator needs at least one horizon");
    for (int h : spec.horizons)
        if (h < 1 || h > horizon_limit()) throw ComputeError("generator horizon out of range 1..10");
}

double draw_magnitude(Rng& rng, const GeneratorSpec& spec) {
    return rng.uniform(spec.magnitude_lo_pct, spec.magnitude_hi_pct);
}

// Direction encoded as a signed forecast magnitude; Flat records carry 0.
SignalRecord make_record(const std::string& ticker, Date creation_day, Date target, int horizon, int direction,
                         double magnitude, int minute) {
    SignalRecord r;
    r.created_at = DateTime{creation_day, minute};
    r.ticker = ticker;
    r.target_date = target;
    r.forecast_return_pct = direction == 0 ? 0.0 : direction * magnitude;
    r.horizon = horizon;
    return r;
}

template <typename DirectionDraw>
std::vector<SignalRecord> generate(const PriceSeries& prices, const TradingCalendar& calendar, Date first, Date last,
                                   const GeneratorSpec& spec, DirectionDraw&& draw_direction) {
    validate_spec(spec);
    std::vector<int> horizons = spec.horizons;
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    const int max_h = horizons.back();

    Rng rng = ticker_rng(spec.seed, prices.ticker());
    std::vector<SignalRecord> records;
    const auto sessions = calendar.sessions();
    for (size_t i = 0; i < sessions.size(); ++i) {
        const Date day = sessions[i];
        if (day < first || day > last) continue;
        if (i + static_cast<size_t>(max_h) >= sessions.size()) break;
        for (int h : horizons) {
            const Date target = sessions[i + static_cast<size_t>(h)];
            const bool flat = spec.flat_share > 0.0 && rng.bernoulli(spec.flat_share);
            const double magnitude = draw_magnitude(rng, spec);
            const int direction = flat ? 0 : draw_direction(rng, day, h);
            records.push_back(make_record(prices.ticker(), day, target, h, direction, magnitude,
                                          spec.creation_minute));
        }
    }
    return records;
}

} // namespace

std::vector<SignalRecord> random_signals(const PriceSeries& prices, const TradingCalendar& calendar, Date first,
                                         Date last, const GeneratorSpec& spec) {
    return generate(prices, calendar, first, last, spec,
                    [](Rng& rng, Date, int) { return rng.bernoulli(0.5) ? 1 : -1; });
}

std::vector<SignalRecord> calibrated_signals(const PriceSeries& prices, const TradingCalendar& calendar, Date first,
                                             Date last, const GeneratorSpec& spec) {
    return generate(prices, calendar, first, last, spec, [&](Rng& rng, Date day, int h) {
        // Holding period h-1 reaches the close of the record's target date.
        const auto realized = try_holding_return(prices, day, h - 1);
        const bool match = rng.bernoulli(spec.target_accuracy);
        if (!realized || *realized == 0.0) return rng.bernoulli(0.5) ? 1 : -1;
        const int sign = *realized > 0.0 ? 1 : -1;
        return match ? sign : -sign;
    });
}

PriceSeries random_prices(const std::string& ticker, Date first_day, int n_sessions, const PriceWalkSpec& spec) {
    if (n_sessions < 1) throw ComputeError("random_prices needs at least one session");
    Rng rng = ticker_rng(spec.seed, ticker);
    std::vector<Bar> bars;
    bars.reserve(static_cast<size_t>(n_sessions));

    double close = spec.start_price;
    Date day = first_day;
    auto advance_to_weekday = [](Date d) {
        while (d.weekday() == 0 || d.weekday() == 6) d = d.plus_days(1);
        return d;
    };
    day = advance_to_weekday(day);

    for (int i = 0; i < n_sessions; ++i) {
        Bar bar;
        bar.date = day;
        // Log-normal steps keep prices positive.
        const double gap = std::exp(spec.daily_vol * 0.25 * (2.0 * rng.next_unit() - 1.0));
        bar.open = close * gap;
        const double step = std::exp(spec.drift + spec.daily_vol * (2.0 * rng.next_unit() - 1.0));
        bar.close = bar.open * step;
        const double hi_pad = 1.0 + spec.intraday_range * rng.next_unit();
        const double lo_pad = 1.0 - spec.intraday_range * rng.next_unit();
        bar.high = std::max(bar.open, bar.close) * hi_pad;
        bar.low = std::min(bar.open, bar.close) * lo_pad;
        bar.volume = std::floor(1e5 + 1e5 * rng.next_unit());
        bars.push_back(bar);
        close = bar.close;
        day = advance_to_weekday(day.plus_days(1));
    }
    return PriceSeries(ticker, std::move(bars));
}

void write_price_file(const std::string& path, std::span<const PriceSeries> universe,
                      const std::string& header_comment) {
    std::ofstream out(path);
    if (!out.is_open()) throw InputError("cannot write " + path);
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "ticker,date,open,high,low,close,volume\n";
    char buf[160];
    for (const PriceSeries& series : universe) {
        for (const Bar& b : series.bars()) {
            std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%.10g,%.10g,%.0f", series.ticker().c_str(),
                          b.date.to_string().c_str(), b.open, b.high, b.low, b.close, b.volume.value_or(0.0));
            out << buf << '\n';
        }
    }
    if (!out.good()) throw InputError("write failed for " + path);
}

} // namespace sigsim
