#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "levsim/market_data.hpp"
#include "levsim/portfolio.hpp"
#include "levsim/rng.hpp"

namespace levsim {

struct SamplerConfig {
    int block_length = 5;          // trading days copied together, joint across indices
    int horizon_years = 10;        // realization length in 252-day years
    int realizations = 2000;
    int bootstrap_resamples = 300;
    std::uint64_t seed = 1;
};

struct RealizationResult {
    double final_yield = 0.0;
    double min_yield = 0.0;
    double max_drawdown = 0.0;
    bool insolvent = false;
};

struct MetricEstimate {
    double value = 0.0;
    double ci_low = 0.0;   // 32nd percentile of the bootstrap distribution
    double ci_high = 0.0;  // 68th percentile
};

struct MetricsSummary {
    MetricEstimate reward;          // median final yield
    MetricEstimate risk_rational;   // 5th-percentile final yield
    MetricEstimate risk_min_yield;  // 5th-percentile minimum yield
    MetricEstimate risk_drawdown;   // median maximum drawdown
    double cagr = 0.0;              // yearly rate equivalent of reward
    int insolvent_count = 0;
};

// Percentile with linear interpolation between order statistics: the value at
// rank p * (n - 1) of the sorted sample. p in [0, 1]; throws on empty input.
double percentile(std::vector<double> values, double p);

// Largest peak-to-trough loss of a yield path: max over t of
// 1 - y(t) / max_{s<=t} y(s).
double max_drawdown(const std::vector<double>& yields);

// Block-bootstrap resampling: the realization is pasted together from
// `block_length`-day runs of the source history, each starting at a uniformly
// drawn day (the last block is truncated to fit). A day's records move as one
// joint row across all indices, preserving cross-correlations; LIBOR moves
// with its day. The result carries a synthetic 21-day-month / 252-day-year
// calendar for the engine's monthly and year-end hooks.
MarketHistory sample_realization(const MarketHistory& source, const SamplerConfig& cfg,
                                 SplitMix64& rng);

// Simulates cfg.realizations independent resampled histories. Realization i
// always draws from rng substream (seed, realization-domain, i), so results
// are identical for any worker count; LEVSIM_THREADS caps the workers
// (0 or unset = hardware concurrency).
std::vector<RealizationResult> run_monte_carlo(const SimScenario& scenario,
                                               const MarketHistory& source,
                                               const SamplerConfig& cfg);

// Bootstrap confidence interval for the p-th percentile of `samples`: the
// percentile is recomputed on `resamples` draws-with-replacement and the
// (32nd, 68th) percentiles of those estimates are returned.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, double p,
                                       int resamples, SplitMix64& rng);

// Reduces per-realization results to the reward/risk metrics with bootstrap
// confidence intervals (deterministic given cfg.seed).
MetricsSummary summarize_results(const std::vector<RealizationResult>& results,
                                 const SamplerConfig& cfg);

// One leverage flavour of the frontier sweep: the funds to hold (first one is
// the stock leg) and the margin target to run them at.
struct LeverageVariant {
    std::string name;
    std::vector<AssetSpec> assets;
    double target_leverage = 1.0;
};

struct FrontierRow {
    int stock_percent = 0;
    std::string variant;
    MetricsSummary metrics;
};

// Evaluates every variant at stock fractions 0, 5, ..., 100 percent (the
// complement goes to the second fund). Every cell reuses the same sampler
// seed, so all cells see the same resampled histories and differences between
// cells are portfolio effects only.
std::vector<FrontierRow> sweep_frontier(const SimScenario& base,
                                        const std::vector<LeverageVariant>& variants,
                                        const MarketHistory& source, const SamplerConfig& cfg);

}  // namespace levsim
