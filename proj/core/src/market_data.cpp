#include "sigsim/market_data.hpp"

#include "sigsim/csv.hpp"
#include "sigsim/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace sigsim {

PriceSeries::PriceSeries(std::string ticker, std::vector<Bar> bars)
    : ticker_(std::move(ticker)), bars_(std::move(bars)) {
    for (size_t i = 0; i + 1 < bars_.size(); ++i) {
        if (!(bars_[i].date < bars_[i + 1].date))
            throw InputError(ticker_ + ": bar dates not strictly increasing at " + bars_[i + 1].date.to_string());
    }
}

std::optional<size_t> PriceSeries::index_of(Date d) const {
    auto it = std::lower_bound(bars_.begin(), bars_.end(), d,
                               [](const Bar& b, Date day) { return b.date < day; });
    if (it == bars_.end() || it->date != d) return std::nullopt;
    return static_cast<size_t>(it - bars_.begin());
}

std::optional<size_t> PriceSeries::first_index_after(Date d) const {
    auto it = std::upper_bound(bars_.begin(), bars_.end(), d,
                               [](Date day, const Bar& b) { return day < b.date; });
    if (it == bars_.end()) return std::nullopt;
    return static_cast<size_t>(it - bars_.begin());
}

PriceSeries PriceSeries::between(Date first, Date last) const {
    std::vector<Bar> subset;
    for (const Bar& b : bars_)
        if (b.date >= first && b.date <= last) subset.push_back(b);
    return PriceSeries(ticker_, std::move(subset));
}

PriceSeries PriceSeries::up_to(Date last) const {
    return between(Date(std::numeric_limits<int>::min()), last);
}

TradingCalendar::TradingCalendar(std::vector<Date> sessions) : sessions_(std::move(sessions)) {
    for (size_t i = 0; i + 1 < sessions_.size(); ++i)
        if (!(sessions_[i] < sessions_[i + 1]))
            throw InputError("calendar sessions not strictly increasing at " + sessions_[i + 1].to_string());
}

bool TradingCalendar::contains(Date d) const {
    return std::binary_search(sessions_.begin(), sessions_.end(), d);
}

std::optional<size_t> TradingCalendar::index_of(Date d) const {
    auto it = std::lower_bound(sessions_.begin(), sessions_.end(), d);
    if (it == sessions_.end() || *it != d) return std::nullopt;
    return static_cast<size_t>(it - sessions_.begin());
}

Date TradingCalendar::next_session(Date day) const {
    auto next = try_next_session(day);
    if (!next) throw ComputeError("no session after " + day.to_string());
    return *next;
}

std::optional<Date> TradingCalendar::try_next_session(Date day) const {
    auto it = std::upper_bound(sessions_.begin(), sessions_.end(), day);
    if (it == sessions_.end()) return std::nullopt;
    return *it;
}

std::optional<size_t> TradingCalendar::lower_bound_index(Date d) const {
    auto it = std::lower_bound(sessions_.begin(), sessions_.end(), d);
    if (it == sessions_.end()) return std::nullopt;
    return static_cast<size_t>(it - sessions_.begin());
}

std::optional<size_t> TradingCalendar::last_index_at_or_before(Date d) const {
    auto it = std::upper_bound(sessions_.begin(), sessions_.end(), d);
    if (it == sessions_.begin()) return std::nullopt;
    return static_cast<size_t>(it - sessions_.begin()) - 1;
}

Date next_session(const TradingCalendar& calendar, Date day) {
    if (calendar.empty()) throw ComputeError("empty trading calendar");
    return calendar.next_session(day);
}

const PriceSeries* IngestResult::find(const std::string& ticker) const {
    auto it = std::lower_bound(series.begin(), series.end(), ticker,
                               [](const PriceSeries& s, const std::string& t) { return s.ticker() < t; });
    if (it == series.end() || it->ticker() != ticker) return nullptr;
    return &*it;
}

IngestResult ingest_prices(const std::string& path) {
    csv::TableReader reader(path);
    IngestResult result;
    if (reader.header().empty()) return result; // empty file

    const size_t c_ticker = reader.column("ticker");
    const size_t c_date = reader.column("date");
    const size_t c_open = reader.column("open");
    const size_t c_high = reader.column("high");
    const size_t c_low = reader.column("low");
    const size_t c_close = reader.column("close");
    const bool has_volume = reader.has_column("volume");
    const size_t c_volume = has_volume ? reader.column("volume") : 0;

    std::map<std::string, std::vector<Bar>> by_ticker;
    std::set<std::pair<std::string, int>> seen;
    std::set<Date> all_dates;

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const size_t line = reader.line_number();
        const size_t needed = std::max({c_ticker, c_date, c_open, c_high, c_low, c_close}) + 1;
        if (fields.size() < needed) {
            result.rejected.push_back({line, "", "malformed row: expected >= " + std::to_string(needed) +
                                                     " columns, got " + std::to_string(fields.size())});
            continue;
        }
        const std::string& ticker = fields[c_ticker];
        Bar bar;
        try {
            bar.date = Date::parse(fields[c_date]);
            bar.open = csv::parse_double(fields[c_open], "open", line);
            bar.high = csv::parse_double(fields[c_high], "high", line);
            bar.low = csv::parse_double(fields[c_low], "low", line);
            bar.close = csv::parse_double(fields[c_close], "close", line);
            if (has_volume && c_volume < fields.size() && !fields[c_volume].empty())
                bar.volume = csv::parse_double(fields[c_volume], "volume", line);
        } catch (const InputError& e) {
            result.rejected.push_back({line, ticker, std::string("malformed row: ") + e.what()});
            continue;
        }
        if (!bar.valid()) {
            result.rejected.push_back({line, ticker, "OHLC inconsistency on " + bar.date.to_string()});
            continue;
        }
        if (!seen.emplace(ticker, bar.date.serial()).second)
            throw InputError(path + ": duplicate bar for " + ticker + " on " + bar.date.to_string() + " (line " +
                             std::to_string(line) + ")");
        all_dates.insert(bar.date);
        by_ticker[ticker].push_back(bar);
    }

    for (auto& [ticker, bars] : by_ticker) {
        std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) { return a.date < b.date; });
        result.series.emplace_back(ticker, std::move(bars));
    }
    result.calendar = TradingCalendar(std::vector<Date>(all_dates.begin(), all_dates.end()));
    return result;
}

double holding_return(const PriceSeries& series, Date signal_day, int h) {
    auto r = try_holding_return(series, signal_day, h);
    if (!r)
        throw ComputeError(series.ticker() + ": insufficient history for holding return at h=" + std::to_string(h) +
                           " from " + signal_day.to_string());
    return *r;
}

std::optional<double> try_holding_return(const PriceSeries& series, Date signal_day, int h) {
    if (h < 0) return std::nullopt;
    auto entry = series.first_index_after(signal_day);
    if (!entry) return std::nullopt;
    const size_t exit = *entry + static_cast<size_t>(h);
    if (exit >= series.size()) return std::nullopt;
    return series.bar(exit).close / series.bar(*entry).open - 1.0;
}

} // namespace sigsim
