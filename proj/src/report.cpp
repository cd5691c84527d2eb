#include "levsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "levsim/errors.hpp"

namespace levsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

nlohmann::json metric_json(const MetricEstimate& m) {
    return {{"value", m.value}, {"ci", {m.ci_low, m.ci_high}}};
}

void print_summary(const MetricsSummary& s, int realizations) {
    auto line = [](const char* name, const MetricEstimate& m) {
        std::printf("  %-28s %10.4f  [%.4f, %.4f]\n", name, m.value, m.ci_low, m.ci_high);
    };
    line("median final yield", s.reward);
    line("5th pct final yield", s.risk_rational);
    line("5th pct minimum yield", s.risk_min_yield);
    line("median max drawdown", s.risk_drawdown);
    std::printf("  %-28s %10.4f\n", "median CAGR", s.cagr);
    std::printf("  %-28s %7d of %d\n", "insolvent", s.insolvent_count, realizations);
}

bool flooded(const MetricsSummary& s, int realizations) {
    return realizations > 0 &&
           static_cast<double>(s.insolvent_count) / realizations > kInsolvencyFloodThreshold;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const BacktestResult& result,
                          const std::vector<std::string>& asset_ids) {
    std::ofstream out = open_out(path);
    out << "date,yield,total,margin_debt,leverage";
    for (const auto& id : asset_ids) out << ",frac_" << id;
    out << ",tax_year_gains,cumulative_tax_paid\n";
    for (const TrajectoryPoint& p : result.trajectory) {
        out << p.date.to_string() << ',' << fmt(p.yield) << ',' << fmt(p.total) << ','
            << fmt(p.margin_debt) << ',' << fmt(p.leverage);
        for (double f : p.fractions) out << ',' << fmt(f);
        out << ',' << fmt(p.tax_year_gains) << ',' << fmt(p.cumulative_tax_paid) << '\n';
    }
}

void write_realizations_csv(const std::filesystem::path& path,
                            const std::vector<RealizationResult>& results) {
    std::ofstream out = open_out(path);
    out << "realization,final_yield,min_yield,max_drawdown,insolvent\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RealizationResult& r = results[i];
        out << i << ',' << fmt(r.final_yield) << ',' << fmt(r.min_yield) << ','
            << fmt(r.max_drawdown) << ',' << (r.insolvent ? 1 : 0) << '\n';
    }
}

void write_summary_json(const std::filesystem::path& path, const MetricsSummary& summary,
                        const SamplerConfig& sampler) {
    nlohmann::json j{{"schema_version", 1},
                     {"horizon_years", sampler.horizon_years},
                     {"realizations", sampler.realizations},
                     {"block_length", sampler.block_length},
                     {"bootstrap_resamples", sampler.bootstrap_resamples},
                     {"seed", sampler.seed},
                     {"insolvent_count", summary.insolvent_count},
                     {"reward", metric_json(summary.reward)},
                     {"cagr", summary.cagr},
                     {"risk_rational", metric_json(summary.risk_rational)},
                     {"risk_min_yield", metric_json(summary.risk_min_yield)},
                     {"risk_drawdown", metric_json(summary.risk_drawdown)}};
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_histogram_csv(const std::filesystem::path& path, const std::vector<double>& yields) {
    constexpr int bins = 60;
    double lo = 0.0, hi = 0.0;
    std::size_t positive = 0;
    for (double y : yields) {
        if (y <= 0.0) continue;
        if (positive == 0) {
            lo = hi = y;
        } else {
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        ++positive;
    }
    std::ofstream out = open_out(path);
    out << "bin_low,bin_high,count\n";
    if (positive == 0) return;
    if (hi <= lo * (1.0 + 1e-12)) {  // all mass in one point: give it width
        lo /= 1.01;
        hi *= 1.01;
    }
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / bins;
    std::vector<std::size_t> count(bins, 0);
    for (double y : yields) {
        if (y <= 0.0) continue;
        int b = static_cast<int>((std::log(y) - log_lo) / step);
        count[std::clamp(b, 0, bins - 1)]++;
    }
    for (int b = 0; b < bins; ++b)
        out << fmt(std::exp(log_lo + b * step)) << ',' << fmt(std::exp(log_lo + (b + 1) * step))
            << ',' << count[b] << '\n';
}

void write_frontier_csv(const std::filesystem::path& path, const std::vector<FrontierRow>& rows) {
    std::ofstream out = open_out(path);
    out << "stock_percent,variant,reward,reward_ci_low,reward_ci_high,cagr,"
           "risk_rational,risk_rational_ci_low,risk_rational_ci_high,"
           "risk_min_yield,risk_min_yield_ci_low,risk_min_yield_ci_high,"
           "risk_drawdown,risk_drawdown_ci_low,risk_drawdown_ci_high,insolvent_count\n";
    for (const FrontierRow& r : rows) {
        const MetricsSummary& m = r.metrics;
        out << r.stock_percent << ',' << r.variant << ',' << fmt(m.reward.value) << ','
            << fmt(m.reward.ci_low) << ',' << fmt(m.reward.ci_high) << ',' << fmt(m.cagr) << ','
            << fmt(m.risk_rational.value) << ',' << fmt(m.risk_rational.ci_low) << ','
            << fmt(m.risk_rational.ci_high) << ',' << fmt(m.risk_min_yield.value) << ','
            << fmt(m.risk_min_yield.ci_low) << ',' << fmt(m.risk_min_yield.ci_high) << ','
            << fmt(m.risk_drawdown.value) << ',' << fmt(m.risk_drawdown.ci_low) << ','
            << fmt(m.risk_drawdown.ci_high) << ',' << m.insolvent_count << '\n';
    }
}

int cmd_backtest(const ScenarioConfig& config) {
    const MarketHistory history = load_market_history(config);
    const SimScenario scenario = make_scenario(config);
    const BacktestResult result = run_backtest(scenario, history, /*record_trajectory=*/true);

    std::vector<std::string> ids;
    for (const auto& a : scenario.assets) ids.push_back(a.id);
    write_trajectory_csv(config.output_dir / "trajectory.csv", result, ids);

    const double days = static_cast<double>(result.trajectory.back().date.serial() -
                                            result.trajectory.front().date.serial());
    const double years = days / 365.25;
    std::printf("backtest over %zu trading days (%s to %s)\n", result.trajectory.size() - 1,
                result.trajectory.front().date.to_string().c_str(),
                result.trajectory.back().date.to_string().c_str());
    std::printf("  %-28s %10.4f\n", "final yield", result.final_yield);
    if (result.final_yield > 0.0 && years > 0.0)
        std::printf("  %-28s %10.4f\n", "CAGR", std::pow(result.final_yield, 1.0 / years) - 1.0);
    std::printf("  %-28s %10.4f\n", "minimum yield", result.min_yield);
    std::printf("  %-28s %10.4f\n", "max drawdown", result.max_drawdown);
    std::printf("  %-28s %10.4f\n", "tax paid",
                result.trajectory.back().cumulative_tax_paid);
    if (result.insolvent) std::printf("  portfolio went bankrupt\n");
    std::printf("wrote %s\n", (config.output_dir / "trajectory.csv").c_str());
    return kExitOk;
}

int cmd_mc(const ScenarioConfig& config) {
    const MarketHistory history = load_market_history(config);
    const SimScenario scenario = make_scenario(config);
    const auto results = run_monte_carlo(scenario, history, config.sampler);
    const MetricsSummary summary = summarize_results(results, config.sampler);

    write_realizations_csv(config.output_dir / "realizations.csv", results);
    write_summary_json(config.output_dir / "summary.json", summary, config.sampler);
    std::vector<double> finals;
    finals.reserve(results.size());
    for (const auto& r : results) finals.push_back(r.final_yield);
    write_histogram_csv(config.output_dir / "histogram.csv", finals);

    std::printf("%d realizations of %d years (seed %llu)\n", config.sampler.realizations,
                config.sampler.horizon_years,
                static_cast<unsigned long long>(config.sampler.seed));
    print_summary(summary, config.sampler.realizations);
    std::printf("wrote %s\n", (config.output_dir / "summary.json").c_str());
    return flooded(summary, config.sampler.realizations) ? kExitInsolvencyFlood : kExitOk;
}

int cmd_frontier(const ScenarioConfig& config) {
    const MarketHistory history = load_market_history(config);
    const SimScenario base = make_scenario(config);
    const auto variants = make_frontier_variants(config);
    const auto rows = sweep_frontier(base, variants, history, config.sampler);

    write_frontier_csv(config.output_dir / "frontier.csv", rows);
    bool any_flooded = false;
    for (const auto& r : rows)
        if (flooded(r.metrics, config.sampler.realizations)) any_flooded = true;
    std::printf("frontier: %zu cells (%d realizations each, seed %llu)\n", rows.size(),
                config.sampler.realizations, static_cast<unsigned long long>(config.sampler.seed));
    std::printf("wrote %s\n", (config.output_dir / "frontier.csv").c_str());
    return any_flooded ? kExitInsolvencyFlood : kExitOk;
}

}  // namespace levsim
