#pragma once

#include "sigsim/market_data.hpp"
#include "sigsim/signals.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace sigsim {

// Execution parameters: profit-taker and stop-loss as simple returns on the
// entry open, maximum holding period in sessions.
struct ExecParams {
    int mhp = 1;      // >= 1
    double pt = 0.01; // > 0
    double sl = -0.02; // < 0

    void validate() const;
};

enum class ExitReason { ProfitTaker, StopLoss, Expiry, Truncated };
enum class Tiebreak { StopFirst, ProfitFirst };

const char* to_string(ExitReason r);

struct TradeResult {
    std::string ticker;
    int direction = 0; // +1 or -1
    Date entry_date;
    Date exit_date;
    double trade_return = 0.0; // fraction; == pt / == sl on threshold exits
    ExitReason exit_reason = ExitReason::Expiry;
    int realized_holding = 0; // sessions, 0..mhp
};

// Exit decision on raw bar arrays. `entry` indexes the entry session; the
// scan covers sessions entry..entry+mhp with all thresholds as simple
// returns on the entry open. Shared by simulate_trade and the grid runner.
struct TradeScan {
    size_t exit_index = 0;
    double trade_return = 0.0;
    ExitReason reason = ExitReason::Expiry;
};

inline TradeScan scan_trade(std::span<const Bar> bars, size_t entry, int direction, const ExecParams& params,
                            Tiebreak tiebreak) {
    const double open = bars[entry].open;
    const size_t last = std::min(entry + static_cast<size_t>(params.mhp), bars.size() - 1);
    for (size_t d = entry; d <= last; ++d) {
        bool hit_profit, hit_stop;
        if (direction > 0) {
            hit_profit = (bars[d].high - open) / open >= params.pt;
            hit_stop = (bars[d].low - open) / open <= params.sl;
        } else {
            hit_profit = (open - bars[d].low) / open >= params.pt;
            hit_stop = (bars[d].high - open) / open >= -params.sl;
        }
        if (hit_profit && hit_stop) {
            if (tiebreak == Tiebreak::StopFirst) return {d, params.sl, ExitReason::StopLoss};
            return {d, params.pt, ExitReason::ProfitTaker};
        }
        if (hit_stop) return {d, params.sl, ExitReason::StopLoss};
        if (hit_profit) return {d, params.pt, ExitReason::ProfitTaker};
    }
    const double raw = (bars[last].close - open) / open;
    const double signed_return = direction > 0 ? raw : -raw;
    if (last < entry + static_cast<size_t>(params.mhp)) return {last, signed_return, ExitReason::Truncated};
    return {last, signed_return, ExitReason::Expiry};
}

// One signal into one trade. Entry at the open of the first session after
// `signal_day` on the ticker's own bar sequence. Throws ComputeError when no
// entry session exists; a series ending before entry+mhp yields a Truncated
// exit at the last close.
TradeResult simulate_trade(const PriceSeries& series, Date signal_day, int direction, const ExecParams& params,
                           Tiebreak tiebreak = Tiebreak::StopFirst);

enum class DirectionPolicy { LongOnly, ShortOnly, Both };
enum class OverlapPolicy { SinglePosition, AllowOverlap };

struct StreamOptions {
    DirectionPolicy direction_policy = DirectionPolicy::Both;
    OverlapPolicy overlap = OverlapPolicy::SinglePosition;
    Tiebreak tiebreak = Tiebreak::StopFirst;
    double deadband_pct = 0.0;
};

struct StreamResult {
    std::vector<TradeResult> trades;
    // Daily returns in percentage points over the series' sessions, each
    // trade attributed to its exit date (non-compounded).
    std::vector<Date> dates;
    std::vector<double> daily_return_pct;
    std::vector<std::string> skipped; // per-signal skip diagnostics
};

// Run an ordered signal stream into trades. Under SinglePosition a signal
// created strictly before the open trade's exit date is skipped.
StreamResult simulate_stream(const PriceSeries& series, std::span<const SignalRecord> signals,
                             const ExecParams& params, const StreamOptions& options = {});

} // namespace sigsim
