#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "levsim/portfolio.hpp"
#include "levsim/rng.hpp"
#include "levsim/sample_data.hpp"
#include "levsim/tax.hpp"

using namespace levsim;

namespace {

// One book at share price `unit_price` with one lot per (value, basis) pair,
// in purchase order.
PortfolioState book_state(double unit_price, const std::vector<std::pair<double, double>>& lots) {
    PortfolioState st;
    st.books.resize(1);
    AssetBook& b = st.books[0];
    b.unit_price = unit_price;
    for (std::size_t i = 0; i < lots.size(); ++i) {
        PaperLot l;
        l.units = lots[i].first / unit_price;
        l.cost_basis = lots[i].second;
        l.purchase_date = Date{2010, 1, 1 + static_cast<int>(i)};
        b.lots.push_back(l);
        b.units += l.units;
    }
    return st;
}

SimScenario one_asset_scenario(double cgt, double fee = 0.0) {
    SimScenario s;
    AssetSpec a;
    a.id = "FUND";
    a.underlying_index = "IDX";
    s.assets = {a};
    s.fractions = {1.0};
    s.engine.transaction_fee = fee;
    s.engine.cgt = cgt;
    s.engine.tax_enabled = true;
    return s;
}

// Independent root finder for the sale-size equation
//   t = (gains + sign(p) * min(t, |p|)) * cgt.
// The right side falls in t with slope at most cgt < 1, so the root is unique
// and bisection brackets it.
double sale_by_bisection(double gains, double p, double cgt) {
    const double s = p > 0.0 ? 1.0 : (p < 0.0 ? -1.0 : 0.0);
    double lo = 0.0, hi = (gains + std::abs(p)) * cgt + 1.0;
    for (int i = 0; i < 200; ++i) {
        const double t = 0.5 * (lo + hi);
        const double owed = (gains + s * std::min(t, std::abs(p))) * cgt;
        (owed > t ? lo : hi) = t;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("sale size worked examples") {
    // Profit below the cap: t = g*cgt/(1-cgt).
    CHECK(tax_sell_amount(30.0, 100.0, 0.25) == doctest::Approx(10.0).epsilon(1e-12));
    // A small profitable lot is consumed whole: t = (g+p)*cgt.
    CHECK(tax_sell_amount(30.0, 5.0, 0.25) == doctest::Approx(8.75).epsilon(1e-12));
    // Selling a losing lot shrinks the bill: t = g*cgt/(1+cgt).
    CHECK(tax_sell_amount(10.0, -10.0, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
    // A small loss is consumed whole.
    CHECK(tax_sell_amount(30.0, -2.0, 0.25) == doctest::Approx(7.0).epsilon(1e-12));

    CHECK(tax_sell_amount(0.0, 50.0, 0.25) == 0.0);
    CHECK(tax_sell_amount(-3.0, 50.0, 0.25) == 0.0);
    CHECK(tax_sell_amount(30.0, 100.0, 0.0) == 0.0);
}

TEST_CASE("sale size satisfies its fixed-point equation") {
    // The sale must cover the tax on the standing gains plus whatever the sale
    // itself realizes.
    SplitMix64 rng = SplitMix64::substream(19890103, RngDomain::fixture, 11);
    for (int i = 0; i < 1000; ++i) {
        const double g = rng.next_double() * 1e6;
        const double p = (rng.next_double() * 2.0 - 1.0) * 1e6;
        const double t = tax_sell_amount(g, p, 0.25);
        const double s = p > 0.0 ? 1.0 : (p < 0.0 ? -1.0 : 0.0);
        const double realized = s * std::min(t, std::abs(p));
        CHECK(std::abs(t - (g + realized) * 0.25) <= 1e-9);
        CHECK(std::abs(t - sale_by_bisection(g, p, 0.25)) <= 1e-9);
        CHECK(t >= 0.0);
    }
}

TEST_CASE("sale size is continuous at the branch boundary") {
    // The two formulas meet where the sale exactly consumes the lot's profit.
    for (double p : {250.0, -250.0, 3.0, -3.0}) {
        for (double cgt : {0.1, 0.25, 0.4}) {
            const double s = p > 0.0 ? 1.0 : -1.0;
            const double boundary = (1.0 - s * cgt) / cgt * std::abs(p);
            const double below = tax_sell_amount(boundary * (1.0 - 1e-12), p, cgt);
            const double above = tax_sell_amount(boundary * (1.0 + 1e-12), p, cgt);
            CHECK(std::abs(above - below) <= 1e-9 * std::abs(p));
            CHECK(tax_sell_amount(boundary, p, cgt) == doctest::Approx(std::abs(p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("settlement sells just enough from a single lot") {
    const SimScenario s = one_asset_scenario(0.25);
    PortfolioState st = book_state(1.0, {{100.0, 50.0}});
    st.tax.gains = 30.0;

    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_FALSE(res.insolvent);
    CHECK(st.tax.gains == 0.0);
    CHECK(st.tax.cumulative_tax_paid == doctest::Approx(10.0));
    CHECK(st.books[0].value() == doctest::Approx(90.0));
    // The sale realized 10 of the 50 profit, so the basis stays put.
    CHECK(st.books[0].lots[0].cost_basis == doctest::Approx(50.0));
    CHECK(st.cash == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("settlement rolls through an exhausted lot") {
    SimScenario s = one_asset_scenario(0.25);
    s.engine.tax_scheme = TaxScheme::fifo;
    PortfolioState st = book_state(1.0, {{10.0, 8.0}, {100.0, 100.0}});
    st.tax.gains = 100.0;

    // First lot (profit 2) sells whole; the leftover balance moves to the
    // second, break-even lot. Total bill: 0.25 * (100 + 2) = 25.5.
    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == doctest::Approx(25.5).epsilon(1e-12));
    CHECK_FALSE(res.insolvent);
    REQUIRE(st.books[0].lots.size() == 1);
    CHECK(st.books[0].value() == doctest::Approx(110.0 - 25.5));
    CHECK(st.books[0].lots[0].cost_basis == doctest::Approx(100.0 - 15.5));
    CHECK(st.tax.gains == 0.0);
}

TEST_CASE("settlement splits the bill across assets and spills") {
    SimScenario s = one_asset_scenario(0.25);
    AssetSpec b = s.assets[0];
    b.id = "OTHER";
    s.assets.push_back(b);
    s.fractions = {0.5, 0.5};

    PortfolioState st;
    st.books.resize(2);
    for (AssetBook* book : {&st.books[0], &st.books[1]}) book->unit_price = 1.0;
    PaperLot small{1.0, 1.0, Date{2010, 1, 1}};
    PaperLot big{100.0, 100.0, Date{2010, 1, 1}};
    st.books[0].lots = {small};
    st.books[0].units = 1.0;
    st.books[1].lots = {big};
    st.books[1].units = 100.0;
    st.tax.gains = 40.0;

    // First asset's share needs 5 but only holds 1; the rest spills into the
    // second asset. All lots are break-even, so the bill is 0.25 * 40 = 10.
    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(st.books[0].lots.empty());
    CHECK(st.books[1].value() == doctest::Approx(91.0));
    CHECK_FALSE(res.insolvent);
}

TEST_CASE("net losses carry into the next year") {
    const SimScenario s = one_asset_scenario(0.25);
    PortfolioState st = book_state(1.0, {{100.0, 50.0}});
    st.tax.gains = -5.0;

    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == 0.0);
    CHECK(st.tax.gains == doctest::Approx(-5.0));  // not cleared
    CHECK(st.books[0].value() == doctest::Approx(100.0));

    // A later profitable year only pays on the net balance.
    st.tax.gains += 8.0;
    const SettlementResult res2 = settle_year_end(st, s);
    CHECK(res2.tax_paid == doctest::Approx(tax_sell_amount(3.0, 50.0, 0.25)).epsilon(1e-12));
    CHECK(st.tax.gains == 0.0);
}

TEST_CASE("zero tax rate clears the year without selling") {
    const SimScenario s = one_asset_scenario(0.0);
    PortfolioState st = book_state(1.0, {{100.0, 50.0}});
    st.tax.gains = 30.0;
    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == 0.0);
    CHECK(st.tax.gains == 0.0);
    CHECK(st.books[0].value() == doctest::Approx(100.0));
}

TEST_CASE("standing cash covers a bill the lots cannot") {
    const SimScenario s = one_asset_scenario(0.25);
    PortfolioState st = book_state(1.0, {{10.0, 10.0}});
    st.tax.gains = 1000.0;
    st.cash = 300.0;

    // Bill 250; the lot contributes its full 10, cash pays the other 240.
    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == doctest::Approx(250.0).epsilon(1e-12));
    CHECK_FALSE(res.insolvent);
    CHECK(st.cash == doctest::Approx(60.0));
    CHECK(st.books[0].lots.empty());
}

TEST_CASE("an unpayable bill marks the run insolvent") {
    const SimScenario s = one_asset_scenario(0.25);
    PortfolioState st = book_state(1.0, {{10.0, 10.0}});
    st.tax.gains = 1000.0;

    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.insolvent);
    CHECK(res.tax_paid == doctest::Approx(10.0));
    CHECK(res.unpaid_tax == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("liquidation fees are raised by extra sales into the new year") {
    const SimScenario s = one_asset_scenario(0.25, 0.1);
    PortfolioState st = book_state(1.0, {{100.0, 50.0}});
    st.tax.gains = 30.0;

    // The 10 sold for the bill nets only 9 after the fee; one more unit of
    // stock (grossed up by the fee) is sold to cover it, and its realized
    // profit opens the next year's balance.
    const SettlementResult res = settle_year_end(st, s);
    CHECK(res.tax_paid == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_FALSE(res.insolvent);
    CHECK(st.cash == doctest::Approx(0.0).scale(1.0));
    CHECK(st.tax.gains == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
    CHECK(st.books[0].value() == doctest::Approx(90.0 - 1.0 / 0.9));
}

TEST_CASE("scheme order changes the bill") {
    // A losing lot shrinks the sale needed; the optimizing scheme fronts it,
    // first-in-first-out hits the older profitable lot.
    const double g = 10.0;
    SimScenario s = one_asset_scenario(0.25);

    s.engine.tax_scheme = TaxScheme::fifo;
    PortfolioState fifo = book_state(1.0, {{50.0, 30.0}, {50.0, 60.0}});
    fifo.tax.gains = g;
    const double fifo_tax = settle_year_end(fifo, s).tax_paid;
    CHECK(fifo_tax == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

    s.engine.tax_scheme = TaxScheme::optimized;
    PortfolioState opt = book_state(1.0, {{50.0, 30.0}, {50.0, 60.0}});
    opt.tax.gains = g;
    const double opt_tax = settle_year_end(opt, s).tax_paid;
    CHECK(opt_tax == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(opt_tax < fifo_tax);
}

TEST_CASE("dividends feed the taxable balance") {
    PortfolioState st;
    record_dividend_gain(st.tax, 0.25);
    record_dividend_gain(st.tax, 0.5);
    CHECK(st.tax.gains == doctest::Approx(0.75));
    CHECK(st.tax.cumulative_tax_paid == 0.0);
}

TEST_CASE("two flat days with a year boundary settle dividend tax") {
    // Dividend rate 25.2%/year = 0.1% of holdings per day. Two quiet days
    // accrue 0.002 of cash; the year-end sale covers 25% of that.
    MarketHistory h;
    h.index_ids = {"IDX"};
    h.start_date = Date{2009, 12, 31};
    h.dates = {Date{2010, 1, 4}, Date{2010, 12, 31}};
    h.dp_price = {{0.0, 0.0}};
    h.dp_total_return = {{0.0, 0.0}};
    h.libor = {0.0, 0.0};
    h.month_start = {0, 0};
    h.year_end = {0, 1};

    SimScenario s = one_asset_scenario(0.25);
    s.assets[0].dividend_model = DividendModel{25.2, 0.0};

    const BacktestResult r = run_backtest(s, h, true);
    CHECK(r.final_yield == doctest::Approx(1.0015).epsilon(1e-12));
    REQUIRE(r.trajectory.size() == 3);
    CHECK(r.trajectory.back().cumulative_tax_paid == doctest::Approx(0.0005).epsilon(1e-12));
    CHECK(r.trajectory.back().tax_year_gains == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("taxes only ever reduce the outcome") {
    const MarketHistory h = slice_window(sample_history(), Date{1995, 1, 1}, Date{2004, 12, 31});
    SimScenario s;
    AssetSpec stock, bond;
    stock.id = "S";
    stock.underlying_index = "STOCKS";
    stock.dividend_model = kSampleStockDividend;
    bond.id = "B";
    bond.underlying_index = "BONDS";
    bond.dividend_model = kSampleBondDividend;
    s.assets = {stock, bond};
    s.fractions = {0.5, 0.5};

    SimScenario taxed = s;
    taxed.engine.tax_enabled = true;
    taxed.engine.cgt = 0.25;

    const BacktestResult free_run = run_backtest(s, h, true);
    const BacktestResult taxed_run = run_backtest(taxed, h, true);
    CHECK(taxed_run.final_yield <= free_run.final_yield + 1e-12);
    CHECK(free_run.trajectory.back().cumulative_tax_paid == 0.0);
    CHECK(taxed_run.trajectory.back().cumulative_tax_paid > 0.0);

    // The cumulative tax column never decreases.
    double last = 0.0;
    for (const auto& p : taxed_run.trajectory) {
        CHECK(p.cumulative_tax_paid >= last);
        last = p.cumulative_tax_paid;
    }
}

TEST_CASE("the optimizing scheme never pays more than first-in-first-out") {
    const MarketHistory h = slice_window(sample_history(), Date{1995, 1, 1}, Date{2004, 12, 31});
    SimScenario s;
    AssetSpec stock, bond;
    stock.id = "S";
    stock.underlying_index = "STOCKS";
    stock.dividend_model = kSampleStockDividend;
    bond.id = "B";
    bond.underlying_index = "BONDS";
    bond.dividend_model = kSampleBondDividend;
    s.assets = {stock, bond};
    s.fractions = {0.5, 0.5};
    s.engine.tax_enabled = true;
    s.engine.cgt = 0.25;

    s.engine.tax_scheme = TaxScheme::optimized;
    const BacktestResult opt = run_backtest(s, h, true);
    s.engine.tax_scheme = TaxScheme::fifo;
    const BacktestResult fifo = run_backtest(s, h, true);

    CHECK(opt.trajectory.back().cumulative_tax_paid <=
          fifo.trajectory.back().cumulative_tax_paid + 1e-9);
}
