#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "levsim/market_data.hpp"
#include "levsim/montecarlo.hpp"
#include "levsim/portfolio.hpp"

namespace levsim {

enum class LeverageMode { none, letf, margin };

// One asset as configured: where its data lives and how the fund charges.
// The total-return series used for leveraged funds comes from tr_csv when
// given, else from an Adj Close column of price_csv, else it is synthesized
// from the price changes and the dividend model. A tr_csv shorter than the
// price series is spliced: days it covers use its real changes.
struct AssetConfig {
    std::string id;
    std::string index;          // defaults to id
    std::string price_csv;
    std::string tr_csv;         // optional
    double expense_ratio = 0.0; // yearly percent, the plain fund's
    double letf_expense_ratio = 1.0;  // yearly percent, when run as a leveraged fund
    DividendModel dividend;
};

// A scenario file, parsed and defaulted but not yet resolved against data.
struct ScenarioConfig {
    std::filesystem::path data_dir;   // resolved against the config file location
    std::string libor_csv;            // optional; otherwise libor_rate applies
    double libor_rate = 0.0;          // constant fallback, yearly percent
    std::vector<AssetConfig> assets;
    std::vector<double> fractions;
    LeverageMode leverage_mode = LeverageMode::none;
    int letf_factor = 0;              // 2 or 3 when mode is letf
    double margin_target = 1.0;       // when mode is margin
    EngineConfig engine;
    std::optional<Date> window_start;
    std::optional<Date> window_end;
    SamplerConfig sampler;            // carries horizon_years as well
    double initial_investment = 1.0;
    std::filesystem::path output_dir = "out";
};

// Reads and validates a scenario file; errors name the offending field, e.g.
// "assets[1].dividend.base: expected number".
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_json(const std::string& text, const std::filesystem::path& base_dir);

// Loads every configured series, builds total-return counterparts, aligns
// them on the shared calendar and applies the window, when one is set.
MarketHistory load_market_history(const ScenarioConfig& config);

// The simulation setup for the configured leverage mode: plain funds, the
// funds replaced by daily-reset leveraged versions (id suffixed x2/x3), or
// plain funds on margin.
SimScenario make_scenario(const ScenarioConfig& config);

// The standard frontier variants for a two-asset config: unleveraged, 2x and
// 3x leveraged funds, and margin at the configured (default 1.8) target.
std::vector<LeverageVariant> make_frontier_variants(const ScenarioConfig& config);

}  // namespace levsim
