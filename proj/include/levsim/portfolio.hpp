#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levsim/date.hpp"
#include "levsim/market_data.hpp"
#include "levsim/tax.hpp"

namespace levsim {

// One tradable fund in the portfolio.
// A plain index fund (leverage_factor == 1, tracks_total_return == false)
// follows the price index and pays the modelled dividend as cash. A leveraged
// fund tracks leverage_factor times the daily change of the total-return
// index, charges its own expense ratio and a borrow cost, and pays no
// dividend.
struct AssetSpec {
    std::string id;
    std::string underlying_index;
    double leverage_factor = 1.0;
    double expense_ratio = 0.0;  // yearly percent
    DividendModel dividend_model;
    bool tracks_total_return = false;

    void validate() const;  // throws ConfigError
};

// A buy creates a paper lot; its value moves with the fund and its cost basis
// is the cash originally spent (fees included). Lots are the unit of
// capital-gains accounting. Value is stored as a share count so that a day's
// price move costs one multiplication per fund instead of one per lot.
struct PaperLot {
    double units = 0.0;
    double cost_basis = 0.0;
    Date purchase_date;
};

// All lots of one fund plus the fund's current share price. `units` caches
// the sum over lots and is maintained by the trading functions.
struct AssetBook {
    double unit_price = 1.0;
    double units = 0.0;
    std::vector<PaperLot> lots;

    double value() const { return units * unit_price; }
    double lot_value(const PaperLot& l) const { return l.units * unit_price; }
    double lot_profit(const PaperLot& l) const { return lot_value(l) - l.cost_basis; }
};

struct EngineConfig {
    double transaction_fee = 0.001;           // fraction of every transacted amount
    double margin_rate = 1.59;                // yearly percent charged on margin debt
    double rebalance_fraction_trigger = 20.0; // percentage points of fraction drift
    double rebalance_leverage_trigger = 0.10; // relative drift of leverage from target
    double cgt = 0.25;                        // capital-gains tax rate
    bool tax_enabled = false;
    TaxScheme tax_scheme = TaxScheme::optimized;
    double periodic_investment = 0.0;         // cash added every month start
};

// A complete simulation setup: which funds, their ideal fractions, the margin
// target (1 = no borrowing) and the engine parameters.
struct SimScenario {
    std::vector<AssetSpec> assets;
    std::vector<double> fractions;    // ideal fractions, sum to 1
    double target_leverage = 1.0;
    EngineConfig engine;
    double initial_investment = 1.0;

    void validate() const;  // throws ConfigError
};

struct PortfolioState {
    std::vector<AssetBook> books;
    double cash = 0.0;
    double margin_debt = 0.0;
    TaxLedger tax;

    double total() const {
        double t = cash;
        for (const auto& b : books) t += b.value();
        return t;
    }
    double equity() const { return total() - margin_debt; }
    double leverage() const {
        const double e = equity();
        return (margin_debt > 0.0 && e > 0.0) ? total() / e : 1.0;
    }
};

// ---- daily accrual formulas (rates in yearly percent, changes in percent) --

// Fund tracking the price index: the day's change less the expense drag.
inline double evolve_etf_daily(double dp_index, double expense_ratio) {
    return dp_index - expense_ratio / kTradingDaysPerYear;
}

// Leveraged fund: amplified total-return change, less expense drag, less the
// financing cost of the borrowed (leverage_factor - 1) exposure at LIBOR.
inline double evolve_letf_daily(double dp_index_tr, double leverage_factor, double expense_ratio,
                                double libor) {
    return dp_index_tr * leverage_factor - expense_ratio / kTradingDaysPerYear -
           libor * (leverage_factor - 1.0) / kTradingDaysPerYear;
}

// One day's dividend cash on a holding, at `yearly_rate` percent per year.
inline double accrue_dividend_cash(double value, double yearly_rate) {
    return value * yearly_rate / (100.0 * kTradingDaysPerYear);
}

// One day's interest on margin debt.
inline double accrue_margin_interest(double debt, double yearly_rate) {
    return debt * yearly_rate / (100.0 * kTradingDaysPerYear);
}

// ---- trading ---------------------------------------------------------------

// Lot visit order for a tax scheme: fifo keeps purchase order, optimized goes
// least profitable first (stable on ties).
std::vector<std::size_t> ordered_lot_indices(const AssetBook& book, TaxScheme scheme);

// Spends `amount` of cash on fund `asset`: the new lot is worth
// (1 - fee) * amount and its cost basis is the full amount spent.
void buy_paper(PortfolioState& state, std::size_t asset, double amount, double fee,
               const Date& date);

// Liquidates `amount` of fund value, consuming lots in scheme order, and
// credits (1 - fee) * amount to cash. Returns the realized gain: per lot
// sign(P) * min(sold, |P|), or the whole profit P when the lot is used up.
// Throws std::invalid_argument when `amount` exceeds the fund's value.
double sell_amount(PortfolioState& state, std::size_t asset, double amount, TaxScheme scheme,
                   double fee);

// True when a fraction drifted `rebalance_fraction_trigger` percentage points
// from ideal, or (with margin) leverage drifted `rebalance_leverage_trigger`
// relative from target.
bool check_rebalance_trigger(const PortfolioState& state, const SimScenario& scenario);

struct RebalancePlan {
    double delta_margin = 0.0;        // borrow (+) or repay (-)
    std::vector<double> delta_asset;  // buy (+) or sell (-) per fund, gross
};

// Trades that restore ideal fractions and target leverage:
//   delta_margin = L_target * (T - M) - T   (0 without margin)
//   delta_i      = f_ideal_i * (T + delta_margin) - T_i
// where T includes standing cash, which the buys sweep back into the funds.
RebalancePlan plan_rebalance(const PortfolioState& state, const SimScenario& scenario);

// Executes a plan: sells first, then the margin adjustment, then buys from the
// pooled cash. Fees make the pool fall slightly short of the planned buys, in
// which case the buys are scaled down pro rata. Realized gains accrue to the
// tax ledger.
void rebalance(PortfolioState& state, const SimScenario& scenario, const Date& date);

// ---- simulation ------------------------------------------------------------

struct StepResult {
    bool insolvent = false;
    double unpaid_tax = 0.0;  // liability left uncovered when insolvent
};

// Advances one trading day (row `day` of the history): price evolution,
// dividend accrual, margin interest, monthly investment, rebalance trigger,
// and year-end tax settlement, in that order.
StepResult step_day(PortfolioState& state, const SimScenario& scenario, const MarketHistory& h,
                    std::size_t day);

// Portfolio bought at day zero: with margin the initial borrow is
// (L_target - 1) * investment, and the gross amount is split by the ideal
// fractions.
PortfolioState init_portfolio(const SimScenario& scenario, const Date& date);

struct TrajectoryPoint {
    Date date;
    double yield = 0.0;  // equity / initial investment
    double total = 0.0;
    double margin_debt = 0.0;
    double leverage = 1.0;
    std::vector<double> fractions;
    double tax_year_gains = 0.0;
    double cumulative_tax_paid = 0.0;
};

struct BacktestResult {
    double final_yield = 0.0;
    double min_yield = 0.0;
    double max_drawdown = 0.0;  // may exceed 1 when equity goes negative
    bool insolvent = false;
    std::vector<TrajectoryPoint> trajectory;  // only when recording is on
};

// Runs the scenario over every day of the history. The first trajectory point
// is the freshly bought portfolio on start_date. A day that ends with equity
// <= 0, or an unpayable tax bill, stops the run and marks it insolvent; the
// uncovered liability is charged against the final yield.
BacktestResult run_backtest(const SimScenario& scenario, const MarketHistory& h,
                            bool record_trajectory = false);

}  // namespace levsim
