#pragma once

#include <cstdint>

namespace levsim {

struct PortfolioState;
struct SimScenario;

// Order in which paper lots are consumed when selling.
//   optimized: least profitable lot first, which defers realized gains
//   fifo:      oldest purchase first
enum class TaxScheme { optimized, fifo };

// Running capital-gains account for the current tax year.
// `gains` accumulates realized gains from sells plus dividend payouts; a
// negative balance (net losses) is carried into following years and no tax
// is due. After a settled year the balance restarts from zero.
struct TaxLedger {
    double gains = 0.0;
    double cumulative_tax_paid = 0.0;
};

// Dividends are taxed like realized capital gains.
inline void record_dividend_gain(TaxLedger& ledger, double amount) { ledger.gains += amount; }

// Gross amount to sell from a lot with unrealized profit `lot_profit` so that
// the proceeds cover the capital-gains tax on `gains` plus the tax triggered
// by the sale itself:
//   deltaT = cgt * (gains + realized(deltaT)),
//   realized(deltaT) = sign(lot_profit) * min(deltaT, |lot_profit|).
// Solving the fixed point gives
//   deltaT = gains * cgt / (1 - sign(P) * cgt)          while deltaT <= |P|,
//   deltaT = (gains + P) * cgt                          beyond that,
// with the branch boundary at gains* = (1 - sign(P) * cgt) / cgt * |P|.
double tax_sell_amount(double gains, double lot_profit, double cgt);

struct SettlementResult {
    double tax_paid = 0.0;      // gross value liquidated to pay the year's tax
    bool insolvent = false;     // portfolio could not cover the tax bill
    double unpaid_tax = 0.0;    // residual liability when insolvent
};

// Year-end settlement: splits the year's taxable gains across assets by their
// ideal fractions, liquidates just enough of each (lot by lot, in scheme
// order) to pay the tax, and resets the ledger for the next year. A share
// that exhausts one asset's lots spills over to the next; when every lot is
// gone and tax remains, the portfolio is insolvent.
SettlementResult settle_year_end(PortfolioState& state, const SimScenario& scenario);

}  // namespace levsim
