#include "sigsim/run_config.hpp"

#include "sigsim/errors.hpp"
#include "sigsim/rng.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace sigsim {

using nlohmann::json;

GridSpec RunConfig::grid() const {
    if (grid_mhp.empty() && grid_pt.empty() && grid_sl.empty()) return default_grid(grid_include_upper);
    GridSpec spec = default_grid(grid_include_upper);
    if (!grid_mhp.empty()) spec.mhp_values = grid_mhp;
    if (!grid_pt.empty()) spec.pt_values = grid_pt;
    if (!grid_sl.empty()) spec.sl_values = grid_sl;
    spec.validate();
    return spec;
}

std::vector<DirectionPolicy> RunConfig::side_list() const {
    std::vector<DirectionPolicy> out;
    for (const auto& s : sides) out.push_back(side_from_string(s));
    if (out.empty()) throw InputError("config: sides must be non-empty");
    return out;
}

Criterion RunConfig::criterion_value() const {
    return criterion_from_string(criterion);
}

Tiebreak RunConfig::tiebreak_value() const {
    if (tiebreak == "stop_first") return Tiebreak::StopFirst;
    if (tiebreak == "profit_first") return Tiebreak::ProfitFirst;
    throw InputError("config: unknown tiebreak '" + tiebreak + "'");
}

OverlapPolicy RunConfig::overlap_value() const {
    if (overlap == "single_position") return OverlapPolicy::SinglePosition;
    if (overlap == "allow_overlap") return OverlapPolicy::AllowOverlap;
    throw InputError("config: unknown overlap policy '" + overlap + "'");
}

int RunConfig::session_open_minute() const {
    const DateTime probe = DateTime::parse("1970-01-01 " + session_open);
    return probe.minute_of_day;
}

GridOptions RunConfig::grid_options() const {
    GridOptions options;
    options.tiebreak = tiebreak_value();
    options.overlap = overlap_value();
    options.deadband_pct = deadband_pct;
    options.include_truncated = include_truncated;
    options.workers = workers;
    options.periods_per_year = periods_per_year;
    return options;
}

PortfolioOptions RunConfig::portfolio_options() const {
    PortfolioOptions options;
    options.rule.min_observations = min_observations;
    if (beta_bound) options.rule.beta_filter = BetaFilter{*beta_bound, beta_exclude_above};
    options.rule.min_sharpe = min_sharpe;
    options.rule.rank_metric = rank_metric_from_string(rank_metric);
    options.rule.ascending = rank_ascending;
    options.rule.top_n = top_n;
    options.weights = weight_kind_from_string(weight_scheme);
    options.leverage.multiplier = leverage_multiplier;
    options.leverage.annual_cost_pct = leverage_cost_pct;
    if (leverage_accrual == "whole_run")
        options.leverage.accrual = AccrualMode::WholeRun;
    else if (leverage_accrual == "per_position")
        options.leverage.accrual = AccrualMode::PerPosition;
    else
        throw InputError("config: unknown leverage accrual '" + leverage_accrual + "'");
    if (combine == "sum")
        options.combine = CombineMode::Sum;
    else if (combine == "average")
        options.combine = CombineMode::Average;
    else
        throw InputError("config: unknown combine mode '" + combine + "'");
    options.regime_split = Date::parse(regime_split);
    options.sim.tiebreak = tiebreak_value();
    options.sim.overlap = overlap_value();
    options.sim.deadband_pct = deadband_pct;
    options.sim.include_truncated_in_metrics = include_truncated;
    options.sim.periods_per_year = periods_per_year;
    options.workers = workers;
    return options;
}

namespace {

json to_json(const RunConfig& c) {
    json j;
    j["price_file"] = c.price_file;
    j["signal_file"] = c.signal_file;
    j["benchmark_file"] = c.benchmark_file;
    j["out_dir"] = c.out_dir;
    j["grid_include_upper"] = c.grid_include_upper;
    j["grid_mhp"] = c.grid_mhp;
    j["grid_pt"] = c.grid_pt;
    j["grid_sl"] = c.grid_sl;
    j["sides"] = c.sides;
    j["criterion"] = c.criterion;
    j["min_trades"] = c.min_trades;
    j["ci_level"] = c.ci_level;
    j["two_sided"] = c.two_sided;
    j["deadband_pct"] = c.deadband_pct;
    j["baseline_p0"] = c.baseline_p0;
    j["session_open"] = c.session_open;
    j["start_quarter"] = c.start_quarter;
    j["end_quarter"] = c.end_quarter;
    j["calibration_quarters"] = c.calibration_quarters;
    j["min_observations"] = c.min_observations;
    if (c.beta_bound) j["beta_bound"] = *c.beta_bound;
    j["beta_exclude_above"] = c.beta_exclude_above;
    if (c.min_sharpe) j["min_sharpe"] = *c.min_sharpe;
    j["rank_metric"] = c.rank_metric;
    if (c.rank_ascending) j["rank_ascending"] = *c.rank_ascending;
    j["top_n"] = c.top_n;
    j["weight_scheme"] = c.weight_scheme;
    j["leverage_multiplier"] = c.leverage_multiplier;
    j["leverage_cost_pct"] = c.leverage_cost_pct;
    j["leverage_accrual"] = c.leverage_accrual;
    j["combine"] = c.combine;
    j["regime_split"] = c.regime_split;
    j["tiebreak"] = c.tiebreak;
    j["overlap"] = c.overlap;
    j["include_truncated"] = c.include_truncated;
    j["periods_per_year"] = c.periods_per_year;
    j["rolling_sharpe_window"] = c.rolling_sharpe_window;
    j["rolling_corr_window"] = c.rolling_corr_window;
    j["target_accuracy"] = c.target_accuracy;
    j["flat_share"] = c.flat_share;
    j["horizons"] = c.horizons;
    j["workers"] = c.workers;
    j["seed"] = c.seed;
    return j;
}

void from_json_into(const json& j, RunConfig& c) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("price_file", c.price_file);
    get("signal_file", c.signal_file);
    get("benchmark_file", c.benchmark_file);
    get("out_dir", c.out_dir);
    get("grid_include_upper", c.grid_include_upper);
    get("grid_mhp", c.grid_mhp);
    get("grid_pt", c.grid_pt);
    get("grid_sl", c.grid_sl);
    get("sides", c.sides);
    get("criterion", c.criterion);
    get("min_trades", c.min_trades);
    get("ci_level", c.ci_level);
    get("two_sided", c.two_sided);
    get("deadband_pct", c.deadband_pct);
    get("baseline_p0", c.baseline_p0);
    get("session_open", c.session_open);
    get("start_quarter", c.start_quarter);
    get("end_quarter", c.end_quarter);
    get("calibration_quarters", c.calibration_quarters);
    get("min_observations", c.min_observations);
    if (j.contains("beta_bound")) c.beta_bound = j.at("beta_bound").get<double>();
    get("beta_exclude_above", c.beta_exclude_above);
    if (j.contains("min_sharpe")) c.min_sharpe = j.at("min_sharpe").get<double>();
    get("rank_metric", c.rank_metric);
    if (j.contains("rank_ascending")) c.rank_ascending = j.at("rank_ascending").get<bool>();
    get("top_n", c.top_n);
    get("weight_scheme", c.weight_scheme);
    get("leverage_multiplier", c.leverage_multiplier);
    get("leverage_cost_pct", c.leverage_cost_pct);
    get("leverage_accrual", c.leverage_accrual);
    get("combine", c.combine);
    get("regime_split", c.regime_split);
    get("tiebreak", c.tiebreak);
    get("overlap", c.overlap);
    get("include_truncated", c.include_truncated);
    get("periods_per_year", c.periods_per_year);
    get("rolling_sharpe_window", c.rolling_sharpe_window);
    get("rolling_corr_window", c.rolling_corr_window);
    get("target_accuracy", c.target_accuracy);
    get("flat_share", c.flat_share);
    get("horizons", c.horizons);
    get("workers", c.workers);
    get("seed", c.seed);
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw InputError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("config " + path + ": " + e.what());
    }
    RunConfig config;
    try {
        from_json_into(j, config);
    } catch (const json::exception& e) {
        throw InputError("config " + path + ": " + e.what());
    }
    return config;
}

void merge_json_overrides(RunConfig& config, const std::string& json_text) {
    try {
        from_json_into(json::parse(json_text), config);
    } catch (const json::exception& e) {
        throw InputError(std::string("config override: ") + e.what());
    }
}

std::string canonical_json(const RunConfig& config) {
    json j = to_json(config); // nlohmann objects are key-sorted
    // Execution-environment knobs: neither may influence artifact bytes.
    j.erase("out_dir");
    j.erase("workers");
    return j.dump();
}

uint64_t config_hash(const RunConfig& config) {
    return fnv1a64(canonical_json(config));
}

std::string config_hash_hex(const RunConfig& config) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    return buf;
}

} // namespace sigsim
