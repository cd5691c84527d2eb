#pragma once

#include <filesystem>
#include <vector>

#include "levsim/montecarlo.hpp"
#include "levsim/portfolio.hpp"
#include "levsim/scenario.hpp"

namespace levsim {

// Exit codes of the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitInsolvencyFlood = 3;

// A Monte-Carlo run where more than this fraction of realizations went
// insolvent exits with kExitInsolvencyFlood (outputs are still written).
inline constexpr double kInsolvencyFloodThreshold = 0.5;

// Output files use fixed names inside the configured output directory and a
// stable number format, so repeated runs with the same inputs are
// byte-identical.
void write_trajectory_csv(const std::filesystem::path& path, const BacktestResult& result,
                          const std::vector<std::string>& asset_ids);
void write_realizations_csv(const std::filesystem::path& path,
                            const std::vector<RealizationResult>& results);
void write_summary_json(const std::filesystem::path& path, const MetricsSummary& summary,
                        const SamplerConfig& sampler);
// 60 logarithmically spaced bins over the positive final yields; non-positive
// yields (wiped-out runs) are not binned and show up only in insolvent_count.
void write_histogram_csv(const std::filesystem::path& path, const std::vector<double>& yields);
void write_frontier_csv(const std::filesystem::path& path, const std::vector<FrontierRow>& rows);

int cmd_backtest(const ScenarioConfig& config);
int cmd_mc(const ScenarioConfig& config);
int cmd_frontier(const ScenarioConfig& config);

}  // namespace levsim
