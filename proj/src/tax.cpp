#include "levsim/tax.hpp"

#include <algorithm>
#include <cmath>

#include "levsim/portfolio.hpp"

namespace levsim {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double tax_sell_amount(double gains, double lot_profit, double cgt) {
    if (gains <= 0.0 || cgt <= 0.0) return 0.0;
    const double s = sign(lot_profit);
    const double p = std::abs(lot_profit);
    // Largest gains the lot can absorb before it is fully consumed by the
    // sale; both branches meet at |lot_profit| there.
    const double gains_limit = (1.0 - s * cgt) / cgt * p;
    if (gains <= gains_limit) return gains * cgt / (1.0 - s * cgt);
    return (gains + lot_profit) * cgt;
}

SettlementResult settle_year_end(PortfolioState& state, const SimScenario& scenario) {
    SettlementResult result;
    TaxLedger& ledger = state.tax;
    if (ledger.gains <= 0.0) return result;  // net losses carry into next year

    const double cgt = scenario.engine.cgt;
    const double fee = scenario.engine.transaction_fee;
    if (cgt <= 0.0) {
        ledger.gains = 0.0;
        return result;
    }

    // Each asset settles its ideal-fraction share of the year's gains; a share
    // that outlives an asset's lots spills into the next asset.
    double gross_sold = 0.0;
    double share = 0.0;
    for (std::size_t i = 0; i < state.books.size(); ++i) {
        share += scenario.fractions[i] * ledger.gains;
        if (share <= 0.0) continue;
        AssetBook& book = state.books[i];
        for (std::size_t idx : ordered_lot_indices(book, scenario.engine.tax_scheme)) {
            PaperLot& lot = book.lots[idx];
            const double v = book.lot_value(lot);
            const double p = book.lot_profit(lot);
            const double dt = tax_sell_amount(share, p, cgt);
            if (dt <= v) {
                // This lot covers the rest of the share (the sale's own
                // realized gain is already folded into dt).
                const double dg = sign(p) * std::min(dt, std::abs(p));
                lot.units -= dt / book.unit_price;
                lot.cost_basis = (v - dt) - (p - dg);
                gross_sold += dt;
                share = 0.0;
                break;
            }
            // The whole lot goes, its profit realizes, and the leftover sale
            // amount is re-expressed as a gains balance for the next lot.
            gross_sold += v;
            share = (dt - v) / cgt;
            lot.units = 0.0;
        }
        std::erase_if(book.lots, [](const PaperLot& l) { return l.units <= 0.0; });
        double u = 0.0;
        for (const auto& l : book.lots) u += l.units;
        book.units = u;
    }

    // Everything liquidated goes to the tax authority; the transaction fee on
    // the liquidation is the portfolio's own cost.
    state.cash += (1.0 - fee) * gross_sold - gross_sold;
    ledger.cumulative_tax_paid += gross_sold;
    result.tax_paid = gross_sold;

    if (share > 0.0) {
        // All lots are gone and tax is still due; standing cash may cover it.
        double liability = share * cgt;
        const double from_cash = std::clamp(state.cash, 0.0, liability);
        state.cash -= from_cash;
        ledger.cumulative_tax_paid += from_cash;
        result.tax_paid += from_cash;
        liability -= from_cash;
        if (liability > 1e-12) {
            result.insolvent = true;
            result.unpaid_tax = liability;
            ledger.gains = 0.0;
            return result;
        }
    }

    ledger.gains = 0.0;

    // Fees can push cash below zero; raise the difference with extra sales,
    // whose realized gains belong to the new tax year.
    if (state.cash < 0.0) {
        for (std::size_t i = 0; i < state.books.size() && state.cash < 0.0; ++i) {
            const double gross = std::min(-state.cash / (1.0 - fee), state.books[i].value());
            if (gross <= 0.0) continue;
            ledger.gains += sell_amount(state, i, gross, scenario.engine.tax_scheme, fee);
        }
        if (state.cash < -1e-9) {
            result.insolvent = true;
            result.unpaid_tax = -state.cash;
            state.cash = 0.0;
        } else if (state.cash < 0.0) {
            state.cash = 0.0;
        }
    }
    return result;
}

}  // namespace levsim
