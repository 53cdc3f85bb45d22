#pragma once

#include "sigsim/dates.hpp"
#include "sigsim/portfolio.hpp"
#include "sigsim/scenario_grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sigsim {

// Serializable run configuration. A run is a pure function of (config,
// input files); the canonical JSON form is hashed into every artifact
// header.
struct RunConfig {
    std::string price_file;
    std::string signal_file;
    std::string benchmark_file;
    std::string out_dir = "out";

    // grid + optimality
    bool grid_include_upper = false;
    std::vector<int> grid_mhp;       // empty -> default axis
    std::vector<double> grid_pt;
    std::vector<double> grid_sl;
    std::vector<std::string> sides = {"long", "short"};
    std::string criterion = "max_sharpe";
    long min_trades = 30;

    // stats
    double ci_level = 0.95;
    bool two_sided = true;
    double deadband_pct = 0.0;
    double baseline_p0 = 0.5;
    std::string session_open = "09:30"; // exchange-local open used by the ex-ante check

    // schedule + selection
    std::string start_quarter; // empty -> from calendar
    std::string end_quarter;
    int calibration_quarters = 6;
    long min_observations = 30;
    std::optional<double> beta_bound;
    bool beta_exclude_above = true;
    std::optional<double> min_sharpe;
    std::string rank_metric = "mdd";
    std::optional<bool> rank_ascending;
    int top_n = 20;
    std::string weight_scheme = "equal";
    double leverage_multiplier = 1.0;
    double leverage_cost_pct = 0.0;
    std::string leverage_accrual = "whole_run"; // whole_run | per_position
    std::string combine = "sum";                // sum | average
    std::string regime_split = "2025-01-01";

    // simulation conventions
    std::string tiebreak = "stop_first"; // stop_first | profit_first
    std::string overlap = "single_position";
    bool include_truncated = false;
    int periods_per_year = 252;
    int rolling_sharpe_window = 60;
    int rolling_corr_window = 90;

    // synth
    double target_accuracy = 0.5;
    double flat_share = 0.0;
    std::vector<int> horizons = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    int workers = 1;
    uint64_t seed = 0;

    // Typed views (validating).
    GridSpec grid() const;
    std::vector<DirectionPolicy> side_list() const;
    Criterion criterion_value() const;
    GridOptions grid_options() const;
    PortfolioOptions portfolio_options() const;
    Tiebreak tiebreak_value() const;
    OverlapPolicy overlap_value() const;
    int session_open_minute() const;
};

RunConfig load_config(const std::string& path);
void merge_json_overrides(RunConfig& config, const std::string& json_text);

// Key-sorted JSON of every field; identical configs hash identically.
std::string canonical_json(const RunConfig& config);
uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

} // namespace sigsim
