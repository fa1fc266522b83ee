#include "tfmm/backtest.hpp"

#include <algorithm>
#include <cmath>

namespace tfmm {

const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Momentum: return "momentum";
        case StrategyKind::Channel: return "channel";
    }
    return "unknown";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "momentum") return StrategyKind::Momentum;
    if (name == "channel") return StrategyKind::Channel;
    throw ValidationError("unknown strategy name: " + name);
}

void StrategyConfig::check(std::size_t num_assets) const {
    const double inv_n = 1.0 / static_cast<double>(num_assets);
    if (lookback_blocks < 1 || rebalance_cadence_blocks < 1) {
        throw ConfigMismatch("ConfigMismatch: lookback and cadence must be >= 1");
    }
    if (!(weight_floor > 0.0) || !(weight_floor < inv_n) ||
        !(weight_cap >= inv_n) || !(weight_cap < 1.0)) {
        throw ConfigMismatch(
            "ConfigMismatch: need 0 < weight_floor < 1/N <= weight_cap < 1");
    }
}

Vec project_capped_simplex(const Vec& raw, double floor, double cap) {
    const std::size_t n = raw.size();
    auto clipped_sum = [&](double shift) {
        double s = 0.0;
        for (double x : raw) s += std::clamp(x + shift, floor, cap);
        return s;
    };
    double lo = floor - *std::max_element(raw.begin(), raw.end());
    double hi = cap - *std::min_element(raw.begin(), raw.end());
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_sum(mid) < 1.0 ? lo : hi) = mid;
    }
    const double shift = 0.5 * (lo + hi);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::clamp(raw[i] + shift, floor, cap);
    }
    // Spread any residual over the unclipped coordinates.
    double sum = 0.0;
    for (double x : out) sum += x;
    const double resid = 1.0 - sum;
    if (resid != 0.0) {
        std::size_t free_count = 0;
        for (double x : out) {
            if (x > floor && x < cap) ++free_count;
        }
        if (free_count > 0) {
            for (double& x : out) {
                if (x > floor && x < cap)
                    x += resid / static_cast<double>(free_count);
            }
        }
    }
    return out;
}

namespace {

WeightVector targets_from_signal(const Vec& signal,
                                 const StrategyConfig& cfg) {
    const std::size_t n = signal.size();
    double mean = 0.0;
    for (double s : signal) mean += s;
    mean /= static_cast<double>(n);
    Vec raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = 1.0 / static_cast<double>(n) +
                 cfg.aggressiveness * (signal[i] - mean);
    }
    return WeightVector::validate(
        project_capped_simplex(raw, cfg.weight_floor, cfg.weight_cap));
}

void check_window(const PriceSeries& series, std::size_t decision_block,
                  const StrategyConfig& cfg) {
    if (decision_block < cfg.lookback_blocks ||
        decision_block > series.num_blocks()) {
        throw InsufficientHistory(
            "InsufficientHistory: decision block lacks a full lookback window");
    }
}

}  // namespace

WeightVector momentum_targets(const PriceSeries& series,
                              std::size_t decision_block,
                              const StrategyConfig& cfg) {
    cfg.check(series.num_assets());
    check_window(series, decision_block, cfg);
    const std::size_t n = series.num_assets();
    const std::size_t first = decision_block - cfg.lookback_blocks;
    const std::size_t last = decision_block - 1;  // trailing, no look-ahead
    const double alpha =
        2.0 / (static_cast<double>(cfg.lookback_blocks) + 1.0);
    Vec ewma(n, 0.0);
    for (std::size_t t = first + 1; t <= last; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ret =
                std::log(series.prices[t][i]) - std::log(series.prices[t - 1][i]);
            ewma[i] += alpha * (ret - ewma[i]);
        }
    }
    return targets_from_signal(ewma, cfg);
}

WeightVector channel_targets(const PriceSeries& series,
                             std::size_t decision_block,
                             const StrategyConfig& cfg) {
    cfg.check(series.num_assets());
    check_window(series, decision_block, cfg);
    const std::size_t n = series.num_assets();
    const std::size_t first = decision_block - cfg.lookback_blocks;
    const std::size_t last = decision_block - 1;
    Vec signal(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double lo = series.prices[first][i], hi = series.prices[first][i];
        for (std::size_t t = first; t <= last; ++t) {
            lo = std::min(lo, series.prices[t][i]);
            hi = std::max(hi, series.prices[t][i]);
        }
        // Position in the rolling channel, centered: +0.5 at the rolling
        // maximum, -0.5 at the minimum, 0 for a degenerate channel.
        signal[i] = hi > lo
                        ? (series.prices[last][i] - lo) / (hi - lo) - 0.5
                        : 0.0;
    }
    return targets_from_signal(signal, cfg);
}

WeightVector strategy_targets(const PriceSeries& series,
                              std::size_t decision_block,
                              const StrategyConfig& cfg) {
    return cfg.kind == StrategyKind::Momentum
               ? momentum_targets(series, decision_block, cfg)
               : channel_targets(series, decision_block, cfg);
}

PoolState equilibrium_pool(const WeightVector& weights,
                           const PriceVector& prices, double total_value,
                           std::int64_t block_index) {
    if (weights.size() != prices.size()) {
        throw DimensionMismatch("DimensionMismatch: weights vs prices");
    }
    Vec reserves(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        reserves[i] = weights[i] * total_value / prices[i];
    }
    return PoolState(std::move(reserves), weights, block_index);
}

BacktestReport run_backtest(const PriceSeries& series,
                            const StrategyConfig& strategy, SchemeLabel scheme,
                            const FeeParams& fees,
                            const PoolState& initial_pool) {
    series.check();
    strategy.check(series.num_assets());
    if (series.num_assets() != initial_pool.size()) {
        throw ConfigMismatch("ConfigMismatch: series vs pool dimensions");
    }
    const std::size_t t0 = strategy.lookback_blocks;
    const std::size_t cadence = strategy.rebalance_cadence_blocks;
    if (series.num_blocks() < t0 + cadence) {
        throw InsufficientHistory(
            "InsufficientHistory: series shorter than lookback + cadence");
    }

    BacktestReport report;
    report.scheme = scheme;
    report.strategy = strategy.kind;
    report.fee_rate = fees.fee_rate;

    PoolState pool = initial_pool;
    Trajectory active;
    for (std::size_t t = t0; t < series.num_blocks(); ++t) {
        const std::size_t local = (t - t0) % cadence;
        if (local == 0) {
            const WeightVector target = strategy_targets(series, t, strategy);
            active = make_trajectory(
                InterpolationRequest(pool.weights, target, cadence), scheme);
        }
        const WeightVector& w_next = active.steps[local + 1];
        pool = PoolState(pool.reserves, w_next,
                         static_cast<std::int64_t>(t));

        const PriceVector prices = series.at(t);
        ArbOutcome arb = arb_to_equilibrium(pool, prices, fees);
        pool = std::move(arb.pool_after);

        report.timestamps.push_back(series.timestamps[t]);
        report.per_block_value.push_back(pool_value(pool, prices));
        report.fees_total += arb.fees_accrued;
        report.arb_cost_total += arb.arb_profit;
        report.fees_cum.push_back(report.fees_total);
        report.arb_cost_cum.push_back(report.arb_cost_total);
    }
    report.final_return =
        report.per_block_value.back() / report.per_block_value.front() - 1.0;
    return report;
}

std::vector<BacktestReport> compare_schemes(
    const PriceSeries& series, const StrategyConfig& strategy,
    const std::vector<double>& fees_grid,
    const std::vector<SchemeLabel>& schemes, const PoolState& initial_pool) {
    std::vector<BacktestReport> out;
    out.reserve(fees_grid.size() * schemes.size());
    for (double fee : fees_grid) {
        const FeeParams fees = FeeParams::from_rate(fee);
        for (SchemeLabel scheme : schemes) {
            out.push_back(
                run_backtest(series, strategy, scheme, fees, initial_pool));
        }
    }
    return out;
}

}  // namespace tfmm
