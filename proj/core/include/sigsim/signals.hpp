#pragma once

#include "sigsim/dates.hpp"
#include "sigsim/market_data.hpp"

#include <span>
#include <string>
#include <vector>

namespace sigsim {

// Ternary direction code: +1 long, 0 flat, -1 short.
enum class Direction : int { Short = -1, Flat = 0, Long = +1 };

inline int direction_value(Direction d) { return static_cast<int>(d); }

// Sign of the forecast with a symmetric deadband: +1 above +deadband,
// -1 below -deadband, 0 otherwise. An exact zero is always Flat.
Direction direction_of(double forecast_return_pct, double deadband_pct = 0.0);

// One timestamped multi-horizon forecast row.
struct SignalRecord {
    DateTime created_at;
    std::string ticker;
    Date target_date;
    double forecast_return_pct = 0.0;
    int horizon = 1; // 1..10
};

struct LeakageReport {
    bool ok = true;
    std::string reason;
};

// Ex-ante contract: the record must be committed before the target session's
// open, and target_date must be exactly `horizon` sessions after the creation
// session (the last session on or before the creation date).
LeakageReport leakage_check(const SignalRecord& record, const TradingCalendar& calendar,
                            int session_open_minute = 9 * 60 + 30);

// Validated, indexed signal collection. Records are stored sorted by
// (ticker, horizon, created_at); immutable after load.
class SignalSet {
public:
    SignalSet() = default;
    explicit SignalSet(std::vector<SignalRecord> records); // validates + sorts

    static SignalSet load(const std::string& path);

    std::span<const SignalRecord> all() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::vector<std::string> tickers() const;
    std::span<const SignalRecord> for_ticker(const std::string& ticker) const;
    std::span<const SignalRecord> for_ticker_horizon(const std::string& ticker, int horizon) const;

    // Records targeting a given (ticker, target_date).
    std::vector<const SignalRecord*> for_target(const std::string& ticker, Date target) const;

private:
    std::vector<SignalRecord> records_;
};

struct QuarantineResult {
    std::vector<SignalRecord> admitted;
    std::vector<std::string> quarantined; // one reason line per rejected record
};

// Split a signal set on the ex-ante check. Simulation layers consume only
// the admitted records; violations are reported, never silently dropped.
QuarantineResult quarantine_signals(const SignalSet& signals, const TradingCalendar& calendar,
                                    int session_open_minute = 9 * 60 + 30);

int horizon_limit(); // 10

void write_signal_file(const std::string& path, std::span<const SignalRecord> records,
                       const std::string& header_comment = {});

} // namespace sigsim
