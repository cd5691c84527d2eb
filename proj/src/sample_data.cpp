#include "levsim/sample_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "levsim/errors.hpp"
#include "levsim/rng.hpp"

namespace levsim {

namespace {

// A standard-normal pair via Box-Muller; one pair drives one trading day.
std::pair<double, double> normal_pair(SplitMix64& rng) {
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace

SampleMarket generate_sample_market(std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::substream(seed, RngDomain::fixture, 0);

    SampleMarket m;
    m.stocks.id = "STOCKS";
    m.bonds.id = "BONDS";

    // Daily percent-change parameters (yearly: stocks ~10% drift / 15% vol,
    // bonds ~3% drift / 7% vol, correlation -0.15).
    constexpr double stock_mu = 0.0397, stock_sigma = 0.95;
    constexpr double bond_mu = 0.0119, bond_sigma = 0.45;
    constexpr double rho = -0.15;

    double stock_close = 100.0, stock_adj = 100.0;
    double bond_close = 100.0, bond_adj = 100.0;
    double libor = 4.0;

    const Date first{1989, 1, 2};
    const Date last{2020, 12, 31};
    int current_month = 0;
    for (long s = first.serial(); s <= last.serial(); ++s) {
        const Date d = Date::from_serial(s);
        if (!d.is_weekday()) continue;

        // One rate record on the first trading day of each month.
        if (d.month != current_month) {
            current_month = d.month;
            if (!m.libor.dates.empty()) {
                auto [z, unused] = normal_pair(rng);
                libor += 0.05 * (1.8 - libor) + 0.25 * z;
                libor = std::clamp(libor, 0.05, 6.0);
            }
            m.libor.dates.push_back(d);
            m.libor.rate.push_back(libor);
        }

        const bool is_first_day = m.stocks.dates.empty();
        if (!is_first_day) {
            auto [zs, zb] = normal_pair(rng);
            const double dp_s = stock_mu + stock_sigma * zs;
            const double dp_b =
                bond_mu + bond_sigma * (rho * zs + std::sqrt(1.0 - rho * rho) * zb);
            stock_close *= 1.0 + dp_s / 100.0;
            bond_close *= 1.0 + dp_b / 100.0;
            stock_adj *= 1.0 + dp_s / 100.0 +
                         kSampleStockDividend.rate_at(libor) / (100.0 * kTradingDaysPerYear);
            bond_adj *= 1.0 + dp_b / 100.0 +
                        kSampleBondDividend.rate_at(libor) / (100.0 * kTradingDaysPerYear);
        }
        m.stocks.dates.push_back(d);
        m.stocks.close.push_back(stock_close);
        m.stocks.adj_close.push_back(stock_adj);
        m.bonds.dates.push_back(d);
        m.bonds.close.push_back(bond_close);
        m.bonds.adj_close.push_back(bond_adj);
    }
    return m;
}

MarketHistory sample_history(std::uint64_t seed) {
    const SampleMarket m = generate_sample_market(seed);
    auto tr_of = [](const PriceSeries& s) {
        PriceSeries tr;
        tr.id = s.id;
        tr.dates = s.dates;
        tr.close = s.adj_close;
        return tr;
    };
    return align_histories({"STOCKS", "BONDS"}, {m.stocks, m.bonds},
                           {tr_of(m.stocks), tr_of(m.bonds)}, m.libor);
}

void write_sample_dataset(const std::filesystem::path& dir, std::uint64_t seed) {
    const SampleMarket m = generate_sample_market(seed);
    std::filesystem::create_directories(dir);

    auto write_prices = [&dir](const PriceSeries& s, const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw DataError("cannot write " + (dir / name).string());
        out << "Date,Close,Adj Close\n";
        char line[96];
        for (std::size_t k = 0; k < s.size(); ++k) {
            std::snprintf(line, sizeof(line), "%s,%.6f,%.6f\n", s.dates[k].to_string().c_str(),
                          s.close[k], s.adj_close[k]);
            out << line;
        }
    };
    write_prices(m.stocks, "stocks.csv");
    write_prices(m.bonds, "bonds.csv");

    std::ofstream out(dir / "libor.csv");
    if (!out) throw DataError("cannot write " + (dir / "libor.csv").string());
    out << "Date,Rate\n";
    char line[48];
    for (std::size_t k = 0; k < m.libor.size(); ++k) {
        std::snprintf(line, sizeof(line), "%s,%.4f\n", m.libor.dates[k].to_string().c_str(),
                      m.libor.rate[k]);
        out << line;
    }
}

}  // namespace levsim
