#pragma once

#include <cstdint>
#include <filesystem>

#include "levsim/market_data.hpp"

namespace levsim {

// Deterministic synthetic market data for demos and tests: a stock-like and a
// bond-like index over the weekdays of 1989-2020, plus a slowly drifting
// short rate. Statistical texture (drift, volatility, a mild negative
// stock-bond correlation, rate-linked bond dividends) is calibrated to look
// like the real thing without being it.
inline constexpr std::uint64_t kSampleSeed = 19890103;

struct SampleMarket {
    PriceSeries stocks;  // id STOCKS, Close plus dividend-adjusted Close
    PriceSeries bonds;   // id BONDS, likewise
    RateSeries libor;    // monthly records, yearly percent
};

// Dividend models the adjusted closes are generated with; data and engine
// agree exactly when these are used in the scenario.
inline constexpr DividendModel kSampleStockDividend{2.0, 0.0};
inline constexpr DividendModel kSampleBondDividend{5.0, 0.5};

SampleMarket generate_sample_market(std::uint64_t seed = kSampleSeed);

// The generated market, aligned into a joint change history (indices STOCKS
// and BONDS, total-return changes taken from the adjusted closes).
MarketHistory sample_history(std::uint64_t seed = kSampleSeed);

// Writes stocks.csv, bonds.csv and libor.csv into `dir` (created on demand).
void write_sample_dataset(const std::filesystem::path& dir, std::uint64_t seed = kSampleSeed);

}  // namespace levsim
