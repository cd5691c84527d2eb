#include "levsim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "levsim/errors.hpp"

namespace levsim {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed)
            if (it.key() == a) known = true;
        if (!known) throw ConfigError(join(path, it.key()) + ": unknown field");
    }
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
    const json* v = find(j, key);
    if (!v) throw ConfigError(join(path, key) + ": missing required field");
    return *v;
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
    return j.get<bool>();
}

long as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<long>();
}

double number_or(const json& j, const std::string& path, const char* key, double def) {
    const json* v = find(j, key);
    return v ? as_number(*v, join(path, key)) : def;
}

Date as_date(const json& j, const std::string& path) {
    const std::string s = as_string(j, path);
    try {
        return Date::parse(s);
    } catch (const std::invalid_argument&) {
        throw ConfigError(path + ": expected a yyyy-mm-dd date, got \"" + s + "\"");
    }
}

DividendModel parse_dividend(const json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"base", "libor_coefficient"});
    DividendModel m;
    m.base = number_or(j, path, "base", 0.0);
    m.libor_coefficient = number_or(j, path, "libor_coefficient", 0.0);
    return m;
}

AssetConfig parse_asset(const json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"id", "index", "price_csv", "tr_csv", "expense_ratio",
                             "letf_expense_ratio", "dividend"});
    AssetConfig a;
    a.id = as_string(require(j, path, "id"), join(path, "id"));
    a.index = find(j, "index") ? as_string(*find(j, "index"), join(path, "index")) : a.id;
    a.price_csv = as_string(require(j, path, "price_csv"), join(path, "price_csv"));
    if (const json* v = find(j, "tr_csv")) a.tr_csv = as_string(*v, join(path, "tr_csv"));
    a.expense_ratio = number_or(j, path, "expense_ratio", 0.0);
    a.letf_expense_ratio = number_or(j, path, "letf_expense_ratio", 1.0);
    if (const json* v = find(j, "dividend")) a.dividend = parse_dividend(*v, join(path, "dividend"));
    return a;
}

void parse_leverage(const json& j, const std::string& path, ScenarioConfig& c) {
    if (j.is_string()) {
        if (j.get<std::string>() != "none")
            throw ConfigError(path + ": expected \"none\", {\"letf\": 2|3} or {\"margin\": x}");
        c.leverage_mode = LeverageMode::none;
        return;
    }
    expect_object(j, path);
    reject_unknown(j, path, {"letf", "margin"});
    const json* letf = find(j, "letf");
    const json* margin = find(j, "margin");
    if (letf && margin) throw ConfigError(path + ": letf and margin are mutually exclusive");
    if (letf) {
        const long f = as_integer(*letf, join(path, "letf"));
        if (f != 2 && f != 3) throw ConfigError(join(path, "letf") + ": factor must be 2 or 3");
        c.leverage_mode = LeverageMode::letf;
        c.letf_factor = static_cast<int>(f);
    } else if (margin) {
        const double m = as_number(*margin, join(path, "margin"));
        if (m <= 1.0 || m > 4.0)
            throw ConfigError(join(path, "margin") + ": target must lie in (1, 4]");
        c.leverage_mode = LeverageMode::margin;
        c.margin_target = m;
    } else {
        c.leverage_mode = LeverageMode::none;
    }
}

void parse_engine(const json& j, const std::string& path, EngineConfig& e) {
    expect_object(j, path);
    reject_unknown(j, path,
                   {"transaction_fee", "margin_rate", "rebalance_fraction_trigger",
                    "rebalance_leverage_trigger", "cgt", "tax_enabled", "tax_scheme",
                    "periodic_investment"});
    e.transaction_fee = number_or(j, path, "transaction_fee", e.transaction_fee);
    e.margin_rate = number_or(j, path, "margin_rate", e.margin_rate);
    e.rebalance_fraction_trigger =
        number_or(j, path, "rebalance_fraction_trigger", e.rebalance_fraction_trigger);
    e.rebalance_leverage_trigger =
        number_or(j, path, "rebalance_leverage_trigger", e.rebalance_leverage_trigger);
    e.cgt = number_or(j, path, "cgt", e.cgt);
    if (const json* v = find(j, "tax_enabled")) e.tax_enabled = as_bool(*v, join(path, "tax_enabled"));
    if (const json* v = find(j, "tax_scheme")) {
        const std::string s = as_string(*v, join(path, "tax_scheme"));
        if (s == "optimized")
            e.tax_scheme = TaxScheme::optimized;
        else if (s == "fifo")
            e.tax_scheme = TaxScheme::fifo;
        else
            throw ConfigError(join(path, "tax_scheme") + ": expected \"optimized\" or \"fifo\"");
    }
    e.periodic_investment = number_or(j, path, "periodic_investment", e.periodic_investment);
}

void parse_sampler(const json& j, const std::string& path, SamplerConfig& s) {
    expect_object(j, path);
    reject_unknown(j, path, {"block_length", "realizations", "bootstrap_resamples", "seed"});
    if (const json* v = find(j, "block_length"))
        s.block_length = static_cast<int>(as_integer(*v, join(path, "block_length")));
    if (const json* v = find(j, "realizations"))
        s.realizations = static_cast<int>(as_integer(*v, join(path, "realizations")));
    if (const json* v = find(j, "bootstrap_resamples"))
        s.bootstrap_resamples = static_cast<int>(as_integer(*v, join(path, "bootstrap_resamples")));
    if (const json* v = find(j, "seed")) {
        if (!v->is_number_unsigned() && !v->is_number_integer())
            throw ConfigError(join(path, "seed") + ": expected an integer");
        s.seed = v->get<std::uint64_t>();
    }
    if (s.block_length < 1) throw ConfigError(join(path, "block_length") + ": must be >= 1");
    if (s.realizations < 1) throw ConfigError(join(path, "realizations") + ": must be >= 1");
    if (s.bootstrap_resamples < 1)
        throw ConfigError(join(path, "bootstrap_resamples") + ": must be >= 1");
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& text, const std::filesystem::path& base_dir) {
    const json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    expect_object(j, "config");
    reject_unknown(j, "",
                   {"mode", "data_dir", "libor_csv", "libor_rate", "assets", "portfolio",
                    "leverage", "engine", "window", "horizon_years", "sampler",
                    "initial_investment", "output"});
    // The subcommand decides what runs; a "mode" field is accepted as
    // documentation and merely validated.
    if (const json* v = find(j, "mode")) {
        const std::string mode = as_string(*v, "mode");
        if (mode != "backtest" && mode != "mc" && mode != "frontier")
            throw ConfigError("mode: expected \"backtest\", \"mc\" or \"frontier\"");
    }

    ScenarioConfig c;
    const std::string data_dir =
        find(j, "data_dir") ? as_string(*find(j, "data_dir"), "data_dir") : ".";
    c.data_dir = base_dir / data_dir;
    if (const json* v = find(j, "libor_csv")) c.libor_csv = as_string(*v, "libor_csv");
    c.libor_rate = number_or(j, "", "libor_rate", 0.0);
    if (!c.libor_csv.empty() && find(j, "libor_rate"))
        throw ConfigError("libor_rate: cannot combine with libor_csv");

    const json& assets = require(j, "", "assets");
    if (!assets.is_array() || assets.empty())
        throw ConfigError("assets: expected a non-empty array");
    std::set<std::string> seen_ids, seen_indices;
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const std::string path = "assets[" + std::to_string(i) + "]";
        AssetConfig a = parse_asset(assets[i], path);
        if (!seen_ids.insert(a.id).second) throw ConfigError(path + ".id: duplicate id " + a.id);
        if (!seen_indices.insert(a.index).second)
            throw ConfigError(path + ".index: duplicate index " + a.index);
        c.assets.push_back(std::move(a));
    }

    const json& portfolio = require(j, "", "portfolio");
    expect_object(portfolio, "portfolio");
    reject_unknown(portfolio, "portfolio", {"fractions"});
    const json& fractions = require(portfolio, "portfolio", "fractions");
    if (!fractions.is_array()) throw ConfigError("portfolio.fractions: expected an array");
    for (std::size_t i = 0; i < fractions.size(); ++i)
        c.fractions.push_back(
            as_number(fractions[i], "portfolio.fractions[" + std::to_string(i) + "]"));
    if (c.fractions.size() != c.assets.size())
        throw ConfigError("portfolio.fractions: need one fraction per asset");
    double sum = 0.0;
    for (double f : c.fractions) {
        if (f < 0.0 || f > 1.0)
            throw ConfigError("portfolio.fractions: values must lie in [0, 1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("portfolio.fractions: must sum to 1");

    if (const json* v = find(j, "leverage")) parse_leverage(*v, "leverage", c);
    if (const json* v = find(j, "engine")) parse_engine(*v, "engine", c.engine);

    if (const json* v = find(j, "window")) {
        expect_object(*v, "window");
        reject_unknown(*v, "window", {"start", "end"});
        c.window_start = as_date(require(*v, "window", "start"), "window.start");
        c.window_end = as_date(require(*v, "window", "end"), "window.end");
        if (*c.window_end < *c.window_start)
            throw ConfigError("window.end: must not precede window.start");
    }

    if (const json* v = find(j, "horizon_years")) {
        const long h = as_integer(*v, "horizon_years");
        if (h < 1 || h > 100) throw ConfigError("horizon_years: must lie in [1, 100]");
        c.sampler.horizon_years = static_cast<int>(h);
    }
    if (const json* v = find(j, "sampler")) parse_sampler(*v, "sampler", c.sampler);

    c.initial_investment = number_or(j, "", "initial_investment", 1.0);
    if (c.initial_investment <= 0.0) throw ConfigError("initial_investment: must be > 0");
    if (const json* v = find(j, "output")) c.output_dir = as_string(*v, "output");

    // Surface engine/portfolio inconsistencies now rather than at run time.
    make_scenario(c).validate();
    return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_json(text.str(), path.parent_path());
}

MarketHistory load_market_history(const ScenarioConfig& config) {
    RateSeries libor;
    if (!config.libor_csv.empty()) {
        libor = load_rate_csv(config.data_dir / config.libor_csv);
    } else {
        libor.dates.push_back(Date{1900, 1, 1});
        libor.rate.push_back(config.libor_rate);
    }

    std::vector<std::string> index_ids;
    std::vector<PriceSeries> prices, total_returns;
    for (const AssetConfig& a : config.assets) {
        PriceSeries price = load_price_csv(config.data_dir / a.price_csv, a.id);
        const PriceSeries* real_tr = nullptr;
        PriceSeries tr_file;
        if (!a.tr_csv.empty()) {
            tr_file = load_price_csv(config.data_dir / a.tr_csv, a.id + ":tr");
            real_tr = &tr_file;
        } else if (price.has_adj_close()) {
            tr_file.id = a.id + ":tr";
            tr_file.dates = price.dates;
            tr_file.close = price.adj_close;
            real_tr = &tr_file;
        }
        total_returns.push_back(build_total_return(price, a.dividend, libor, real_tr));
        prices.push_back(std::move(price));
        index_ids.push_back(a.index);
    }

    MarketHistory h = align_histories(std::move(index_ids), prices, total_returns, libor);
    if (config.window_start) h = slice_window(h, *config.window_start, *config.window_end);
    return h;
}

SimScenario make_scenario(const ScenarioConfig& config) {
    SimScenario s;
    s.fractions = config.fractions;
    s.engine = config.engine;
    s.initial_investment = config.initial_investment;
    for (const AssetConfig& a : config.assets) {
        AssetSpec spec;
        spec.underlying_index = a.index;
        if (config.leverage_mode == LeverageMode::letf) {
            spec.id = a.id + "x" + std::to_string(config.letf_factor);
            spec.leverage_factor = config.letf_factor;
            spec.expense_ratio = a.letf_expense_ratio;
            spec.tracks_total_return = true;
        } else {
            spec.id = a.id;
            spec.expense_ratio = a.expense_ratio;
            spec.dividend_model = a.dividend;
        }
        s.assets.push_back(std::move(spec));
    }
    if (config.leverage_mode == LeverageMode::margin) s.target_leverage = config.margin_target;
    return s;
}

std::vector<LeverageVariant> make_frontier_variants(const ScenarioConfig& config) {
    if (config.assets.size() != 2)
        throw ConfigError("assets: the frontier sweep needs exactly two assets");

    auto with_mode = [&config](LeverageMode mode, int factor, double margin) {
        ScenarioConfig c = config;
        c.leverage_mode = mode;
        c.letf_factor = factor;
        c.margin_target = margin;
        return make_scenario(c).assets;
    };
    const double margin =
        config.leverage_mode == LeverageMode::margin ? config.margin_target : 1.8;
    char margin_name[32];
    std::snprintf(margin_name, sizeof(margin_name), "margin_%gx", margin);

    std::vector<LeverageVariant> v;
    v.push_back({"1x", with_mode(LeverageMode::none, 0, 1.0), 1.0});
    v.push_back({"2x_letf", with_mode(LeverageMode::letf, 2, 1.0), 1.0});
    v.push_back({"3x_letf", with_mode(LeverageMode::letf, 3, 1.0), 1.0});
    v.push_back({margin_name, with_mode(LeverageMode::none, 0, 1.0), margin});
    return v;
}

}  // namespace levsim
