#include "levsim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "levsim/errors.hpp"

namespace levsim {

namespace {

double percentile_sorted(const std::vector<double>& sorted, double p) {
    const double rank = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = rank - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

unsigned worker_count() {
    if (const char* env = std::getenv("LEVSIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile of empty sample");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile p outside [0, 1]");
    std::sort(values.begin(), values.end());
    return percentile_sorted(values, p);
}

double max_drawdown(const std::vector<double>& yields) {
    double peak = 0.0;
    double dd = 0.0;
    for (double y : yields) {
        peak = std::max(peak, y);
        if (peak > 0.0) dd = std::max(dd, 1.0 - y / peak);
    }
    return dd;
}

MarketHistory sample_realization(const MarketHistory& source, const SamplerConfig& cfg,
                                 SplitMix64& rng) {
    if (cfg.block_length < 1) throw ConfigError("sampler block length must be >= 1");
    if (cfg.horizon_years < 1) throw ConfigError("sampler horizon must be >= 1 year");
    if (source.days() < static_cast<std::size_t>(cfg.block_length))
        throw DataError("source history shorter than one sampling block");

    const std::size_t n = static_cast<std::size_t>(cfg.horizon_years) * kTradingDaysPerYear;
    const std::size_t starts = source.days() - static_cast<std::size_t>(cfg.block_length) + 1;
    const std::size_t num_indices = source.num_indices();

    MarketHistory out;
    out.index_ids = source.index_ids;
    out.dp_price.resize(num_indices);
    out.dp_total_return.resize(num_indices);
    for (std::size_t i = 0; i < num_indices; ++i) {
        out.dp_price[i].reserve(n);
        out.dp_total_return[i].reserve(n);
    }
    out.libor.reserve(n);

    while (out.libor.size() < n) {
        const std::size_t s = rng.next_below(starts);
        const std::size_t take =
            std::min(static_cast<std::size_t>(cfg.block_length), n - out.libor.size());
        for (std::size_t i = 0; i < num_indices; ++i) {
            out.dp_price[i].insert(out.dp_price[i].end(), source.dp_price[i].begin() + s,
                                   source.dp_price[i].begin() + s + take);
            out.dp_total_return[i].insert(out.dp_total_return[i].end(),
                                          source.dp_total_return[i].begin() + s,
                                          source.dp_total_return[i].begin() + s + take);
        }
        out.libor.insert(out.libor.end(), source.libor.begin() + s, source.libor.begin() + s + take);
    }

    // Synthetic calendar: 12 months of 21 days make a 252-day year. Month
    // boundaries drive the monthly investment, the last day of each synthetic
    // year settles tax.
    constexpr int base_year = 2001;
    out.start_date = Date{base_year - 1, 12, 31};
    out.dates.resize(n);
    out.month_start.resize(n);
    out.year_end.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int day_of_year = static_cast<int>(k % kTradingDaysPerYear);
        out.dates[k] = Date{base_year + static_cast<int>(k / kTradingDaysPerYear),
                            day_of_year / 21 + 1, day_of_year % 21 + 1};
        out.month_start[k] = (k > 0 && day_of_year % 21 == 0) ? 1 : 0;
        out.year_end[k] = (day_of_year == kTradingDaysPerYear - 1) ? 1 : 0;
    }
    return out;
}

std::vector<RealizationResult> run_monte_carlo(const SimScenario& scenario,
                                               const MarketHistory& source,
                                               const SamplerConfig& cfg) {
    if (cfg.realizations < 1) throw ConfigError("need at least one realization");
    scenario.validate();

    std::vector<RealizationResult> out(static_cast<std::size_t>(cfg.realizations));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= out.size()) return;
            try {
                SplitMix64 rng = SplitMix64::substream(cfg.seed, RngDomain::realization, i);
                const MarketHistory synth = sample_realization(source, cfg, rng);
                const BacktestResult bt = run_backtest(scenario, synth);
                out[i] = {bt.final_yield, bt.min_yield, bt.max_drawdown, bt.insolvent};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(out.size());
                return;
            }
        }
    };

    const unsigned workers =
        std::min<unsigned>(worker_count(), static_cast<unsigned>(out.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, double p,
                                       int resamples, SplitMix64& rng) {
    if (samples.empty()) throw std::invalid_argument("bootstrap_ci of empty sample");
    if (resamples < 1) throw std::invalid_argument("bootstrap_ci needs resamples >= 1");
    const std::size_t n = samples.size();
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<double> buf(n);
    for (auto& stat : stats) {
        for (std::size_t j = 0; j < n; ++j) buf[j] = samples[rng.next_below(n)];
        std::sort(buf.begin(), buf.end());
        stat = percentile_sorted(buf, p);
    }
    std::sort(stats.begin(), stats.end());
    return {percentile_sorted(stats, 0.32), percentile_sorted(stats, 0.68)};
}

MetricsSummary summarize_results(const std::vector<RealizationResult>& results,
                                 const SamplerConfig& cfg) {
    if (results.empty()) throw std::invalid_argument("summarize_results of empty sample");
    std::vector<double> finals, mins, drawdowns;
    finals.reserve(results.size());
    mins.reserve(results.size());
    drawdowns.reserve(results.size());
    MetricsSummary s;
    for (const auto& r : results) {
        finals.push_back(r.final_yield);
        mins.push_back(r.min_yield);
        drawdowns.push_back(r.max_drawdown);
        if (r.insolvent) ++s.insolvent_count;
    }

    struct Spec {
        MetricEstimate* slot;
        const std::vector<double>* samples;
        double p;
    };
    const Spec specs[] = {{&s.reward, &finals, 0.50},
                          {&s.risk_rational, &finals, 0.05},
                          {&s.risk_min_yield, &mins, 0.05},
                          {&s.risk_drawdown, &drawdowns, 0.50}};
    for (std::size_t m = 0; m < std::size(specs); ++m) {
        specs[m].slot->value = percentile(*specs[m].samples, specs[m].p);
        SplitMix64 rng = SplitMix64::substream(cfg.seed, RngDomain::bootstrap, m);
        const auto ci = bootstrap_ci(*specs[m].samples, specs[m].p, cfg.bootstrap_resamples, rng);
        specs[m].slot->ci_low = ci.first;
        specs[m].slot->ci_high = ci.second;
    }
    s.cagr = s.reward.value > 0.0
                 ? std::pow(s.reward.value, 1.0 / static_cast<double>(cfg.horizon_years)) - 1.0
                 : -1.0;
    return s;
}

std::vector<FrontierRow> sweep_frontier(const SimScenario& base,
                                        const std::vector<LeverageVariant>& variants,
                                        const MarketHistory& source, const SamplerConfig& cfg) {
    if (variants.empty()) throw ConfigError("frontier sweep needs at least one variant");
    for (const auto& v : variants)
        if (v.assets.size() != 2)
            throw ConfigError("frontier sweep needs exactly two funds per variant");

    std::vector<FrontierRow> rows;
    for (int pct = 0; pct <= 100; pct += 5) {
        for (const auto& v : variants) {
            SimScenario scenario = base;
            scenario.assets = v.assets;
            scenario.target_leverage = v.target_leverage;
            scenario.fractions = {pct / 100.0, 1.0 - pct / 100.0};
            const auto results = run_monte_carlo(scenario, source, cfg);
            rows.push_back({pct, v.name, summarize_results(results, cfg)});
        }
    }
    return rows;
}

}  // namespace levsim
