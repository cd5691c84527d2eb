#include "levsim/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levsim/errors.hpp"

namespace levsim {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void refresh_units(AssetBook& book) {
    double u = 0.0;
    for (const auto& l : book.lots) u += l.units;
    book.units = u;
}

}  // namespace

void AssetSpec::validate() const {
    if (id.empty()) throw ConfigError("asset id must not be empty");
    if (underlying_index.empty()) throw ConfigError(id + ": underlying index must not be empty");
    if (leverage_factor < 1.0) throw ConfigError(id + ": leverage factor must be >= 1");
    if (expense_ratio < 0.0) throw ConfigError(id + ": expense ratio must be >= 0");
    if (leverage_factor > 1.0) {
        if (!tracks_total_return)
            throw ConfigError(id + ": a leveraged fund must track the total-return index");
        if (!dividend_model.empty())
            throw ConfigError(id + ": a leveraged fund pays no dividend");
    }
}

void SimScenario::validate() const {
    if (assets.empty()) throw ConfigError("scenario needs at least one asset");
    for (const auto& a : assets) a.validate();
    if (fractions.size() != assets.size())
        throw ConfigError("need one ideal fraction per asset");
    double sum = 0.0;
    for (double f : fractions) {
        if (f < 0.0 || f > 1.0) throw ConfigError("ideal fractions must lie in [0, 1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("ideal fractions must sum to 1");
    if (target_leverage < 1.0) throw ConfigError("target leverage must be >= 1");
    if (target_leverage > 1.0) {
        for (const auto& a : assets)
            if (a.leverage_factor > 1.0)
                throw ConfigError("margin and leveraged funds cannot be combined");
    }
    if (engine.transaction_fee < 0.0 || engine.transaction_fee >= 1.0)
        throw ConfigError("transaction fee must lie in [0, 1)");
    if (engine.cgt < 0.0 || engine.cgt >= 1.0)
        throw ConfigError("capital-gains tax rate must lie in [0, 1)");
    if (engine.rebalance_fraction_trigger <= 0.0)
        throw ConfigError("fraction trigger must be > 0");
    if (engine.rebalance_leverage_trigger <= 0.0)
        throw ConfigError("leverage trigger must be > 0");
    if (engine.periodic_investment < 0.0)
        throw ConfigError("periodic investment must be >= 0");
    if (initial_investment <= 0.0) throw ConfigError("initial investment must be > 0");
}

std::vector<std::size_t> ordered_lot_indices(const AssetBook& book, TaxScheme scheme) {
    std::vector<std::size_t> order(book.lots.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (scheme == TaxScheme::optimized) {
        std::stable_sort(order.begin(), order.end(), [&book](std::size_t a, std::size_t b) {
            return book.lot_profit(book.lots[a]) < book.lot_profit(book.lots[b]);
        });
    }
    return order;
}

void buy_paper(PortfolioState& state, std::size_t asset, double amount, double fee,
               const Date& date) {
    if (amount <= 0.0) return;
    AssetBook& book = state.books[asset];
    PaperLot lot;
    lot.units = (1.0 - fee) * amount / book.unit_price;
    lot.cost_basis = amount;
    lot.purchase_date = date;
    book.lots.push_back(lot);
    book.units += lot.units;
    state.cash -= amount;
}

double sell_amount(PortfolioState& state, std::size_t asset, double amount, TaxScheme scheme,
                   double fee) {
    if (amount <= 0.0) return 0.0;
    AssetBook& book = state.books[asset];
    const double held = book.value();
    if (amount > held * (1.0 + 1e-9) + 1e-12)
        throw std::invalid_argument("sell_amount: " + std::to_string(amount) + " exceeds held " +
                                    std::to_string(held));
    amount = std::min(amount, held);

    double remaining = amount;
    double realized = 0.0;
    for (std::size_t idx : ordered_lot_indices(book, scheme)) {
        if (remaining <= 0.0) break;
        PaperLot& lot = book.lots[idx];
        const double v = book.lot_value(lot);
        if (v <= remaining) {
            // Lot is used up entirely: its whole profit (or loss) realizes.
            realized += v - lot.cost_basis;
            remaining -= v;
            lot.units = 0.0;
        } else {
            const double p = v - lot.cost_basis;
            const double dg = sign(p) * std::min(remaining, std::abs(p));
            realized += dg;
            lot.units -= remaining / book.unit_price;
            lot.cost_basis = (v - remaining) - (p - dg);
            remaining = 0.0;
        }
    }
    std::erase_if(book.lots, [](const PaperLot& l) { return l.units <= 0.0; });
    refresh_units(book);
    state.cash += (1.0 - fee) * amount;
    return realized;
}

bool check_rebalance_trigger(const PortfolioState& state, const SimScenario& scenario) {
    const double total = state.total();
    if (total <= 0.0) return false;
    const double trigger = scenario.engine.rebalance_fraction_trigger / 100.0;
    for (std::size_t i = 0; i < state.books.size(); ++i) {
        const double f = state.books[i].value() / total;
        if (std::abs(f - scenario.fractions[i]) >= trigger) return true;
    }
    if (scenario.target_leverage > 1.0) {
        if (state.equity() <= 0.0) return false;  // bankrupt; nothing to restore
        const double ratio = state.leverage() / scenario.target_leverage;
        if (std::abs(ratio - 1.0) >= scenario.engine.rebalance_leverage_trigger) return true;
    }
    return false;
}

RebalancePlan plan_rebalance(const PortfolioState& state, const SimScenario& scenario) {
    const double total = state.total();
    const double equity = total - state.margin_debt;
    RebalancePlan plan;
    if (scenario.target_leverage > 1.0)
        plan.delta_margin = scenario.target_leverage * equity - total;
    const double target_total = total + plan.delta_margin;
    plan.delta_asset.resize(state.books.size());
    for (std::size_t i = 0; i < state.books.size(); ++i)
        plan.delta_asset[i] = scenario.fractions[i] * target_total - state.books[i].value();
    return plan;
}

void rebalance(PortfolioState& state, const SimScenario& scenario, const Date& date) {
    const double fee = scenario.engine.transaction_fee;
    const RebalancePlan plan = plan_rebalance(state, scenario);
    const double eps = 1e-15 * std::max(1.0, state.total());

    for (std::size_t i = 0; i < state.books.size(); ++i) {
        if (plan.delta_asset[i] < -eps) {
            const double gross = std::min(-plan.delta_asset[i], state.books[i].value());
            state.tax.gains += sell_amount(state, i, gross, scenario.engine.tax_scheme, fee);
        }
    }

    if (plan.delta_margin > 0.0) {
        state.margin_debt += plan.delta_margin;
        state.cash += plan.delta_margin;
    } else if (plan.delta_margin < 0.0) {
        // Fees may leave the cash pool a little short of the planned
        // repayment; repay what is there.
        const double repay = std::min(-plan.delta_margin, state.cash);
        state.margin_debt -= repay;
        state.cash -= repay;
    }

    double planned_buys = 0.0;
    for (double d : plan.delta_asset)
        if (d > eps) planned_buys += d;
    if (planned_buys <= 0.0) return;
    // The whole pool is spent: with fee == 0 it matches the plan exactly and
    // the portfolio lands on the ideal fractions and target leverage; fees
    // shrink every buy pro rata.
    const double scale = std::min(1.0, std::max(0.0, state.cash) / planned_buys);
    for (std::size_t i = 0; i < state.books.size(); ++i)
        if (plan.delta_asset[i] > eps)
            buy_paper(state, i, plan.delta_asset[i] * scale, fee, date);
}

PortfolioState init_portfolio(const SimScenario& scenario, const Date& date) {
    PortfolioState state;
    state.books.resize(scenario.assets.size());
    state.cash = scenario.initial_investment;
    if (scenario.target_leverage > 1.0) {
        const double borrow = (scenario.target_leverage - 1.0) * scenario.initial_investment;
        state.margin_debt = borrow;
        state.cash += borrow;
    }
    const double gross = state.cash;
    for (std::size_t i = 0; i < scenario.assets.size(); ++i)
        buy_paper(state, i, scenario.fractions[i] * gross, scenario.engine.transaction_fee, date);
    return state;
}

StepResult step_day(PortfolioState& state, const SimScenario& scenario, const MarketHistory& h,
                    std::size_t day) {
    StepResult result;
    const double libor = h.libor[day];

    // 1. price evolution
    for (std::size_t i = 0; i < scenario.assets.size(); ++i) {
        const AssetSpec& a = scenario.assets[i];
        const int idx = h.index_of(a.underlying_index);
        const double dp =
            a.tracks_total_return
                ? evolve_letf_daily(h.dp_total_return[idx][day], a.leverage_factor,
                                    a.expense_ratio, libor)
                : evolve_etf_daily(h.dp_price[idx][day], a.expense_ratio);
        // A fund cannot lose more than its value.
        state.books[i].unit_price *= std::max(0.0, 1.0 + dp / 100.0);
    }

    // 2. dividends, paid in cash and taxed like gains
    for (std::size_t i = 0; i < scenario.assets.size(); ++i) {
        const DividendModel& dm = scenario.assets[i].dividend_model;
        if (dm.empty()) continue;
        const double d = accrue_dividend_cash(state.books[i].value(), dm.rate_at(libor));
        if (d > 0.0) {
            state.cash += d;
            record_dividend_gain(state.tax, d);
        }
    }

    // 3. margin interest
    if (state.margin_debt > 0.0)
        state.margin_debt += accrue_margin_interest(state.margin_debt, scenario.engine.margin_rate);

    const bool alive = state.equity() > 0.0;

    // 4. monthly investment: periodic contribution plus accumulated cash
    if (h.month_start[day] && alive) {
        state.cash += scenario.engine.periodic_investment;
        const double invest = state.cash;
        if (invest > 0.0) {
            for (std::size_t i = 0; i < scenario.assets.size(); ++i)
                buy_paper(state, i, scenario.fractions[i] * invest,
                          scenario.engine.transaction_fee, h.dates[day]);
        }
    }

    // 5. drift check
    if (alive && check_rebalance_trigger(state, scenario))
        rebalance(state, scenario, h.dates[day]);

    // 6. year-end tax settlement
    if (h.year_end[day] && scenario.engine.tax_enabled && alive) {
        const SettlementResult s = settle_year_end(state, scenario);
        if (s.insolvent) {
            result.insolvent = true;
            result.unpaid_tax = s.unpaid_tax;
            return result;
        }
    }

    if (state.equity() <= 0.0) result.insolvent = true;
    return result;
}

BacktestResult run_backtest(const SimScenario& scenario, const MarketHistory& h,
                            bool record_trajectory) {
    scenario.validate();
    for (const auto& a : scenario.assets)
        if (h.index_of(a.underlying_index) < 0)
            throw DataError("history has no index " + a.underlying_index);

    PortfolioState state = init_portfolio(scenario, h.start_date);
    const double initial = scenario.initial_investment;

    BacktestResult result;
    auto record = [&](const Date& date, double yield) {
        if (!record_trajectory) return;
        TrajectoryPoint p;
        p.date = date;
        p.yield = yield;
        p.total = state.total();
        p.margin_debt = state.margin_debt;
        p.leverage = state.leverage();
        p.fractions.resize(state.books.size());
        const double t = p.total;
        for (std::size_t i = 0; i < state.books.size(); ++i)
            p.fractions[i] = t > 0.0 ? state.books[i].value() / t : 0.0;
        p.tax_year_gains = state.tax.gains;
        p.cumulative_tax_paid = state.tax.cumulative_tax_paid;
        result.trajectory.push_back(std::move(p));
    };

    double yield = state.equity() / initial;
    double min_yield = yield;
    double peak = yield;
    double max_dd = 0.0;
    record(h.start_date, yield);

    for (std::size_t day = 0; day < h.days(); ++day) {
        const StepResult s = step_day(state, scenario, h, day);
        yield = (state.equity() - s.unpaid_tax) / initial;
        min_yield = std::min(min_yield, yield);
        peak = std::max(peak, yield);
        if (peak > 0.0) max_dd = std::max(max_dd, 1.0 - yield / peak);
        record(h.dates[day], yield);
        if (s.insolvent) {
            result.insolvent = true;
            break;
        }
    }

    result.final_yield = yield;
    result.min_yield = min_yield;
    result.max_drawdown = max_dd;
    return result;
}

}  // namespace levsim
