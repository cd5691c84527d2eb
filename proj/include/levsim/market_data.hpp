#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levsim/date.hpp"

namespace levsim {

inline constexpr int kTradingDaysPerYear = 252;

// Daily closing prices of one instrument, ascending by date.
// adj_close is the dividend-adjusted close when the source file carries one
// (empty otherwise); it serves as a ready-made total-return series.
struct PriceSeries {
    std::string id;
    std::vector<Date> dates;
    std::vector<double> close;
    std::vector<double> adj_close;
    std::size_t dropped_rows = 0;  // malformed/unparsable rows skipped on load

    std::size_t size() const { return dates.size(); }
    bool has_adj_close() const { return adj_close.size() == dates.size() && !adj_close.empty(); }
};

// A sparse rate series in yearly percent (e.g. 1-month LIBOR). Lookups between
// records carry the last known value forward; before the first record the
// first value is used.
struct RateSeries {
    std::vector<Date> dates;
    std::vector<double> rate;

    std::size_t size() const { return dates.size(); }
    double at(const Date& d) const;
};

// Yearly dividend rate as a linear function of the prevailing short rate,
// d(t) = base + libor_coefficient * LIBOR(t), all in yearly percent.
struct DividendModel {
    double base = 0.0;
    double libor_coefficient = 0.0;

    double rate_at(double libor) const { return base + libor_coefficient * libor; }
    bool empty() const { return base == 0.0 && libor_coefficient == 0.0; }
};

// Aligned joint market history: one row per trading day shared by every index.
// Rows hold daily percent changes labelled by the day they land on; start_date
// is the day the first change compounds from. month_start / year_end mark the
// engine's monthly-investment and tax-settlement days and are part of the
// data, so a synthetic (resampled) history can carry its own calendar.
struct MarketHistory {
    std::vector<std::string> index_ids;
    Date start_date;
    std::vector<Date> dates;
    std::vector<std::vector<double>> dp_price;         // [index][day], percent
    std::vector<std::vector<double>> dp_total_return;  // [index][day], percent
    std::vector<double> libor;                         // [day], yearly percent
    std::vector<unsigned char> month_start;            // [day]
    std::vector<unsigned char> year_end;               // [day]

    std::size_t days() const { return dates.size(); }
    std::size_t num_indices() const { return index_ids.size(); }
    int index_of(std::string_view id) const;
};

// Loads a daily price CSV with header Date,Close[,Adj Close] (extra columns
// ignored). Rows with unparsable dates or non-positive prices are dropped and
// counted; out-of-order rows are sorted; duplicate dates keep the last row.
PriceSeries load_price_csv(const std::filesystem::path& path, std::string id);

// Loads a rate CSV with header Date,Rate (yearly percent).
RateSeries load_rate_csv(const std::filesystem::path& path);

// Daily percent changes between consecutive samples:
// out[k] = 100 * (close[k+1] / close[k] - 1); size() - 1 values.
std::vector<double> compute_daily_changes(const PriceSeries& series);

// Builds a total-return price series from a price-only series by accruing the
// modelled dividend on top of each day's price change:
//   tr[0] = close[0];  tr[k+1] = tr[k] * (1 + dp[k]/100 + d(t_k)/(100*252)).
PriceSeries synthesize_total_return(const PriceSeries& prices, const DividendModel& dividends,
                                    const RateSeries& libor);

// Like synthesize_total_return, but days covered by real_tr use its actual
// changes; only days outside its range (or gaps in it) are synthesized. Used
// to splice a late-starting total-return index onto a longer price index.
PriceSeries build_total_return(const PriceSeries& prices, const DividendModel& dividends,
                               const RateSeries& libor, const PriceSeries* real_tr);

// Intersects the calendars of all per-index series pairs and produces the
// joint change history. price[i] and total_return[i] describe index_ids[i].
// Throws DataError when the intersection yields no changes.
MarketHistory align_histories(std::vector<std::string> index_ids,
                              const std::vector<PriceSeries>& price,
                              const std::vector<PriceSeries>& total_return,
                              const RateSeries& libor);

// Restricts a history to change rows landing within [start, end] (inclusive).
// Throws DataError when nothing remains.
MarketHistory slice_window(const MarketHistory& h, const Date& start, const Date& end);

}  // namespace levsim
