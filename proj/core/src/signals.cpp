#include "sigsim/signals.hpp"

#include "sigsim/csv.hpp"
#include "sigsim/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <tuple>

namespace sigsim {

Direction direction_of(double forecast_return_pct, double deadband_pct) {
    if (deadband_pct < 0.0) throw ComputeError("deadband must be non-negative");
    if (forecast_return_pct > deadband_pct) return Direction::Long;
    if (forecast_return_pct < -deadband_pct) return Direction::Short;
    return Direction::Flat;
}

LeakageReport leakage_check(const SignalRecord& record, const TradingCalendar& calendar,
                            int session_open_minute) {
    if (!calendar.contains(record.target_date))
        return {false, "target date " + record.target_date.to_string() + " is not a calendar session"};

    const DateTime target_open{record.target_date, session_open_minute};
    if (!(record.created_at < target_open))
        return {false, "created at " + record.created_at.to_string() + " is not before the open of " +
                           record.target_date.to_string()};

    auto creation = calendar.last_index_at_or_before(record.created_at.date);
    if (!creation) return {false, "no session on or before creation date " + record.created_at.date.to_string()};

    const size_t expected = *creation + static_cast<size_t>(record.horizon);
    if (expected >= calendar.size() || calendar.sessions()[expected] != record.target_date)
        return {false, "target " + record.target_date.to_string() + " is not " + std::to_string(record.horizon) +
                           " sessions after the creation session"};
    return {};
}

namespace {

bool record_key_less(const SignalRecord& a, const SignalRecord& b) {
    return std::tie(a.ticker, a.horizon, a.created_at) < std::tie(b.ticker, b.horizon, b.created_at);
}

} // namespace

SignalSet::SignalSet(std::vector<SignalRecord> records) : records_(std::move(records)) {
    for (const auto& r : records_) {
        if (r.horizon < 1 || r.horizon > horizon_limit())
            throw InputError(r.ticker + ": horizon " + std::to_string(r.horizon) + " out of range 1.." +
                             std::to_string(horizon_limit()));
    }
    std::sort(records_.begin(), records_.end(), record_key_less);
    for (size_t i = 0; i + 1 < records_.size(); ++i) {
        const auto& a = records_[i];
        const auto& b = records_[i + 1];
        if (a.ticker == b.ticker && a.horizon == b.horizon && a.created_at == b.created_at)
            throw InputError("duplicate signal key (" + a.ticker + ", " + a.created_at.to_string() + ", horizon " +
                             std::to_string(a.horizon) + ")");
    }
}

SignalSet SignalSet::load(const std::string& path) {
    csv::TableReader reader(path);
    if (reader.header().empty()) return SignalSet{};

    const size_t c_created = reader.column("created_at");
    const size_t c_ticker = reader.column("ticker");
    const size_t c_target = reader.column("target_date");
    const size_t c_forecast = reader.column("forecast_return");
    const size_t c_horizon = reader.column("horizon");
    const size_t needed = std::max({c_created, c_ticker, c_target, c_forecast, c_horizon}) + 1;

    std::vector<SignalRecord> records;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const size_t line = reader.line_number();
        if (fields.size() < needed)
            throw InputError(path + ": line " + std::to_string(line) + ": expected " + std::to_string(needed) +
                             " columns, got " + std::to_string(fields.size()));
        SignalRecord r;
        r.created_at = DateTime::parse(fields[c_created]);
        r.ticker = fields[c_ticker];
        r.target_date = Date::parse(fields[c_target]);
        r.forecast_return_pct = csv::parse_double(fields[c_forecast], "forecast_return", line);
        r.horizon = static_cast<int>(csv::parse_long(fields[c_horizon], "horizon", line));
        records.push_back(std::move(r));
    }
    return SignalSet(std::move(records));
}

std::vector<std::string> SignalSet::tickers() const {
    std::vector<std::string> out;
    for (const auto& r : records_)
        if (out.empty() || out.back() != r.ticker) out.push_back(r.ticker);
    return out;
}

std::span<const SignalRecord> SignalSet::for_ticker(const std::string& ticker) const {
    auto lo = std::lower_bound(records_.begin(), records_.end(), ticker,
                               [](const SignalRecord& r, const std::string& t) { return r.ticker < t; });
    auto hi = std::upper_bound(records_.begin(), records_.end(), ticker,
                               [](const std::string& t, const SignalRecord& r) { return t < r.ticker; });
    if (lo == hi) return {};
    return {&*lo, static_cast<size_t>(hi - lo)};
}

std::span<const SignalRecord> SignalSet::for_ticker_horizon(const std::string& ticker, int horizon) const {
    auto key_less = [](const SignalRecord& r, const std::pair<const std::string&, int>& key) {
        return std::tie(r.ticker, r.horizon) < std::tie(key.first, key.second);
    };
    auto key_greater = [](const std::pair<const std::string&, int>& key, const SignalRecord& r) {
        return std::tie(key.first, key.second) < std::tie(r.ticker, r.horizon);
    };
    const std::pair<const std::string&, int> key{ticker, horizon};
    auto lo = std::lower_bound(records_.begin(), records_.end(), key, key_less);
    auto hi = std::upper_bound(records_.begin(), records_.end(), key, key_greater);
    if (lo == hi) return {};
    return {&*lo, static_cast<size_t>(hi - lo)};
}

std::vector<const SignalRecord*> SignalSet::for_target(const std::string& ticker, Date target) const {
    std::vector<const SignalRecord*> out;
    for (const auto& r : for_ticker(ticker))
        if (r.target_date == target) out.push_back(&r);
    return out;
}

QuarantineResult quarantine_signals(const SignalSet& signals, const TradingCalendar& calendar,
                                    int session_open_minute) {
    QuarantineResult result;
    result.admitted.reserve(signals.size());
    for (const auto& r : signals.all()) {
        const LeakageReport report = leakage_check(r, calendar, session_open_minute);
        if (report.ok)
            result.admitted.push_back(r);
        else
            result.quarantined.push_back(r.ticker + " " + r.created_at.to_string() + ": " + report.reason);
    }
    return result;
}

int horizon_limit() { return 10; }

void write_signal_file(const std::string& path, std::span<const SignalRecord> records,
                       const std::string& header_comment) {
    std::ofstream out(path);
    if (!out.is_open()) throw InputError("cannot write " + path);
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "created_at,ticker,target_date,forecast_return,horizon\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.6g", r.forecast_return_pct);
        out << r.created_at.to_string() << ',' << r.ticker << ',' << r.target_date.to_string() << ',' << buf << ','
            << r.horizon << '\n';
    }
    if (!out.good()) throw InputError("write failed for " + path);
}

} // namespace sigsim
