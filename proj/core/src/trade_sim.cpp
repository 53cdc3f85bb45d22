#include "sigsim/trade_sim.hpp"

#include "sigsim/errors.hpp"

#include <algorithm>
#include <limits>

namespace sigsim {

void ExecParams::validate() const {
    if (mhp < 1) throw ComputeError("mhp must be >= 1");
    if (!(pt > 0.0)) throw ComputeError("pt must be > 0");
    if (!(sl < 0.0)) throw ComputeError("sl must be < 0");
}

const char* to_string(ExitReason r) {
    switch (r) {
        case ExitReason::ProfitTaker: return "profit_taker";
        case ExitReason::StopLoss: return "stop_loss";
        case ExitReason::Expiry: return "expiry";
        case ExitReason::Truncated: return "truncated";
    }
    return "?";
}

TradeResult simulate_trade(const PriceSeries& series, Date signal_day, int direction, const ExecParams& params,
                           Tiebreak tiebreak) {
    params.validate();
    if (direction != 1 && direction != -1) throw ComputeError("direction must be +1 or -1");
    auto entry = series.first_index_after(signal_day);
    if (!entry)
        throw ComputeError(series.ticker() + ": no entry session after " + signal_day.to_string());

    const TradeScan scan = scan_trade(series.bars(), *entry, direction, params, tiebreak);
    TradeResult trade;
    trade.ticker = series.ticker();
    trade.direction = direction;
    trade.entry_date = series.bar(*entry).date;
    trade.exit_date = series.bar(scan.exit_index).date;
    trade.trade_return = scan.trade_return;
    trade.exit_reason = scan.reason;
    trade.realized_holding = static_cast<int>(scan.exit_index - *entry);
    return trade;
}

StreamResult simulate_stream(const PriceSeries& series, std::span<const SignalRecord> signals,
                             const ExecParams& params, const StreamOptions& options) {
    params.validate();
    StreamResult result;
    result.dates.reserve(series.size());
    for (const Bar& b : series.bars()) result.dates.push_back(b.date);
    result.daily_return_pct.assign(series.size(), 0.0);
    if (series.empty()) return result;

    std::vector<const SignalRecord*> ordered(signals.size());
    for (size_t i = 0; i < signals.size(); ++i) ordered[i] = &signals[i];
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SignalRecord* a, const SignalRecord* b) { return a->created_at < b->created_at; });

    Date open_until(std::numeric_limits<int>::min()); // exit date of the open position
    bool has_open = false;

    for (const SignalRecord* signal : ordered) {
        const Direction dir = direction_of(signal->forecast_return_pct, options.deadband_pct);
        if (dir == Direction::Flat) continue;
        if (options.direction_policy == DirectionPolicy::LongOnly && dir != Direction::Long) continue;
        if (options.direction_policy == DirectionPolicy::ShortOnly && dir != Direction::Short) continue;

        const Date signal_day = signal->created_at.date;
        if (options.overlap == OverlapPolicy::SinglePosition && has_open && signal_day < open_until) {
            result.skipped.push_back(signal->ticker + " " + signal->created_at.to_string() +
                                     ": position open until " + open_until.to_string());
            continue;
        }

        auto entry = series.first_index_after(signal_day);
        if (!entry) {
            result.skipped.push_back(signal->ticker + " " + signal->created_at.to_string() + ": no entry session");
            continue;
        }

        const TradeScan scan = scan_trade(series.bars(), *entry, direction_value(dir), params, options.tiebreak);
        TradeResult trade;
        trade.ticker = series.ticker();
        trade.direction = direction_value(dir);
        trade.entry_date = series.bar(*entry).date;
        trade.exit_date = series.bar(scan.exit_index).date;
        trade.trade_return = scan.trade_return;
        trade.exit_reason = scan.reason;
        trade.realized_holding = static_cast<int>(scan.exit_index - *entry);

        result.daily_return_pct[scan.exit_index] += trade.trade_return * 100.0;
        result.trades.push_back(std::move(trade));
        if (options.overlap == OverlapPolicy::SinglePosition) {
            has_open = true;
            open_until = series.bar(scan.exit_index).date;
        }
    }
    return result;
}

} // namespace sigsim
