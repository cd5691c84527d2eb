#include "levsim/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <unordered_map>

#include "levsim/errors.hpp"

namespace levsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Finds a column by any of the given lower-cased names; -1 when absent.
int find_column(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
    for (size_t i = 0; i < header.size(); ++i) {
        const std::string h = lower(trim(header[i]));
        for (const char* n : names)
            if (h == n) return static_cast<int>(i);
    }
    return -1;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

}  // namespace

double RateSeries::at(const Date& d) const {
    if (dates.empty()) throw DataError("rate series is empty");
    // Last record with date <= d; before the first record, carry the first
    // value backwards.
    auto it = std::upper_bound(dates.begin(), dates.end(), d);
    size_t idx = (it == dates.begin()) ? 0 : static_cast<size_t>(it - dates.begin() - 1);
    return rate[idx];
}

int MarketHistory::index_of(std::string_view id) const {
    for (size_t i = 0; i < index_ids.size(); ++i)
        if (index_ids[i] == id) return static_cast<int>(i);
    return -1;
}

PriceSeries load_price_csv(const std::filesystem::path& path, std::string id) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path.string());
    const auto header = split_csv_line(line);
    const int date_col = find_column(header, {"date"});
    const int close_col = find_column(header, {"close"});
    const int adj_col = find_column(header, {"adj close", "adj_close", "adjclose"});
    if (date_col < 0 || close_col < 0)
        throw DataError(path.string() + ": need Date and Close columns");

    // date -> (close, adj); a std::map both sorts and collapses duplicate
    // dates to the last occurrence.
    std::map<Date, std::pair<double, double>> rows;
    PriceSeries out;
    out.id = std::move(id);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const size_t need = static_cast<size_t>(std::max(date_col, std::max(close_col, adj_col)));
        if (fields.size() <= need) {
            ++out.dropped_rows;
            continue;
        }
        Date d;
        double close = 0.0, adj = 0.0;
        try {
            d = Date::parse(trim(fields[static_cast<size_t>(date_col)]));
        } catch (const std::invalid_argument&) {
            ++out.dropped_rows;
            continue;
        }
        if (!parse_double(fields[static_cast<size_t>(close_col)], close) || close <= 0.0) {
            ++out.dropped_rows;
            continue;
        }
        bool has_adj = false;
        if (adj_col >= 0 && parse_double(fields[static_cast<size_t>(adj_col)], adj) && adj > 0.0)
            has_adj = true;
        rows[d] = {close, has_adj ? adj : -1.0};
    }

    bool all_adj = !rows.empty();
    for (const auto& [d, v] : rows)
        if (v.second <= 0.0) all_adj = false;
    for (const auto& [d, v] : rows) {
        out.dates.push_back(d);
        out.close.push_back(v.first);
        if (all_adj) out.adj_close.push_back(v.second);
    }
    return out;
}

RateSeries load_rate_csv(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path.string());
    const auto header = split_csv_line(line);
    const int date_col = find_column(header, {"date"});
    const int rate_col = find_column(header, {"rate", "value", "libor"});
    if (date_col < 0 || rate_col < 0)
        throw DataError(path.string() + ": need Date and Rate columns");

    std::map<Date, double> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= static_cast<size_t>(std::max(date_col, rate_col))) continue;
        double r = 0.0;
        try {
            Date d = Date::parse(trim(fields[static_cast<size_t>(date_col)]));
            if (parse_double(fields[static_cast<size_t>(rate_col)], r)) rows[d] = r;
        } catch (const std::invalid_argument&) {
            continue;  // e.g. missing-value rows in FRED exports
        }
    }
    if (rows.empty()) throw DataError(path.string() + ": no usable rate rows");
    RateSeries out;
    for (const auto& [d, r] : rows) {
        out.dates.push_back(d);
        out.rate.push_back(r);
    }
    return out;
}

std::vector<double> compute_daily_changes(const PriceSeries& series) {
    std::vector<double> out;
    if (series.size() < 2) return out;
    out.reserve(series.size() - 1);
    for (size_t k = 0; k + 1 < series.size(); ++k)
        out.push_back(100.0 * (series.close[k + 1] / series.close[k] - 1.0));
    return out;
}

PriceSeries build_total_return(const PriceSeries& prices, const DividendModel& dividends,
                               const RateSeries& libor, const PriceSeries* real_tr) {
    if (prices.size() == 0) throw DataError(prices.id + ": empty price series");

    // Map from date to level in the real total-return series, when given.
    std::unordered_map<long, double> tr_at;
    if (real_tr) {
        for (size_t k = 0; k < real_tr->size(); ++k)
            tr_at.emplace(real_tr->dates[k].serial(), real_tr->close[k]);
    }

    PriceSeries out;
    out.id = prices.id;
    out.dates = prices.dates;
    out.close.resize(prices.size());
    out.close[0] = prices.close[0];
    for (size_t k = 0; k + 1 < prices.size(); ++k) {
        double factor;
        auto a = tr_at.find(prices.dates[k].serial());
        auto b = tr_at.find(prices.dates[k + 1].serial());
        if (a != tr_at.end() && b != tr_at.end()) {
            factor = b->second / a->second;
        } else {
            const double dp = 100.0 * (prices.close[k + 1] / prices.close[k] - 1.0);
            const double d = dividends.rate_at(libor.at(prices.dates[k]));
            factor = 1.0 + dp / 100.0 + d / (100.0 * kTradingDaysPerYear);
        }
        out.close[k + 1] = out.close[k] * factor;
    }
    return out;
}

PriceSeries synthesize_total_return(const PriceSeries& prices, const DividendModel& dividends,
                                    const RateSeries& libor) {
    return build_total_return(prices, dividends, libor, nullptr);
}

MarketHistory align_histories(std::vector<std::string> index_ids,
                              const std::vector<PriceSeries>& price,
                              const std::vector<PriceSeries>& total_return,
                              const RateSeries& libor) {
    if (index_ids.empty() || price.size() != index_ids.size() ||
        total_return.size() != index_ids.size())
        throw DataError("align_histories: need matching price/total-return series per index");

    // Calendar: dates present in every series of every index.
    std::map<long, Date> shared;
    for (size_t k = 0; k < price[0].size(); ++k) shared.emplace(price[0].dates[k].serial(), price[0].dates[k]);
    auto intersect = [&shared](const PriceSeries& s) {
        std::map<long, Date> keep;
        for (size_t k = 0; k < s.size(); ++k) {
            auto it = shared.find(s.dates[k].serial());
            if (it != shared.end()) keep.insert(*it);
        }
        shared.swap(keep);
    };
    for (size_t i = 0; i < index_ids.size(); ++i) {
        intersect(price[i]);
        intersect(total_return[i]);
    }
    if (shared.size() < 2)
        throw DataError("align_histories: no overlapping trading days across series");

    std::vector<Date> cal;
    cal.reserve(shared.size());
    for (const auto& [s, d] : shared) cal.push_back(d);

    MarketHistory h;
    h.index_ids = std::move(index_ids);
    h.start_date = cal[0];
    h.dates.assign(cal.begin() + 1, cal.end());
    const size_t n = h.dates.size();
    h.dp_price.assign(h.index_ids.size(), {});
    h.dp_total_return.assign(h.index_ids.size(), {});

    for (size_t i = 0; i < h.index_ids.size(); ++i) {
        auto changes_on = [&cal](const PriceSeries& s) {
            std::unordered_map<long, double> level;
            for (size_t k = 0; k < s.size(); ++k) level.emplace(s.dates[k].serial(), s.close[k]);
            std::vector<double> dp(cal.size() - 1);
            for (size_t k = 0; k + 1 < cal.size(); ++k)
                dp[k] = 100.0 * (level.at(cal[k + 1].serial()) / level.at(cal[k].serial()) - 1.0);
            return dp;
        };
        h.dp_price[i] = changes_on(price[i]);
        h.dp_total_return[i] = changes_on(total_return[i]);
    }

    h.libor.resize(n);
    h.month_start.resize(n);
    h.year_end.resize(n);
    for (size_t k = 0; k < n; ++k) {
        h.libor[k] = libor.at(h.dates[k]);
        const Date& prev = (k == 0) ? h.start_date : h.dates[k - 1];
        h.month_start[k] =
            (h.dates[k].month != prev.month || h.dates[k].year != prev.year) ? 1 : 0;
        // The settlement day is the last trading day of a calendar year. The
        // final row of a history has no successor, so it never settles.
        h.year_end[k] = (k + 1 < n && h.dates[k + 1].year != h.dates[k].year) ? 1 : 0;
    }
    return h;
}

MarketHistory slice_window(const MarketHistory& h, const Date& start, const Date& end) {
    size_t lo = 0;
    while (lo < h.days() && h.dates[lo] < start) ++lo;
    size_t hi = h.days();
    while (hi > lo && h.dates[hi - 1] > end) --hi;
    if (lo >= hi)
        throw DataError("slice_window: no trading days between " + start.to_string() + " and " +
                        end.to_string());

    MarketHistory out;
    out.index_ids = h.index_ids;
    out.start_date = (lo == 0) ? h.start_date : h.dates[lo - 1];
    out.dates.assign(h.dates.begin() + lo, h.dates.begin() + hi);
    out.dp_price.resize(h.num_indices());
    out.dp_total_return.resize(h.num_indices());
    for (size_t i = 0; i < h.num_indices(); ++i) {
        out.dp_price[i].assign(h.dp_price[i].begin() + lo, h.dp_price[i].begin() + hi);
        out.dp_total_return[i].assign(h.dp_total_return[i].begin() + lo,
                                      h.dp_total_return[i].begin() + hi);
    }
    out.libor.assign(h.libor.begin() + lo, h.libor.begin() + hi);
    out.month_start.assign(h.month_start.begin() + lo, h.month_start.begin() + hi);
    out.year_end.assign(h.year_end.begin() + lo, h.year_end.begin() + hi);
    return out;
}

}  // namespace levsim
