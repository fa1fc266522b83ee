#pragma once

#include <string>
#include <vector>

#include "tfmm/arbitrage.hpp"
#include "tfmm/core_types.hpp"
#include "tfmm/price_series.hpp"
#include "tfmm/trajectory_schemes.hpp"

namespace tfmm {

enum class StrategyKind { Momentum, Channel };

const char* strategy_name(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);

// Fixed-parameter block strategies. Momentum tilts toward assets with a
// positive EWMA log-price gradient; Channel tilts toward assets trading
// high inside their rolling min/max channel.
struct StrategyConfig {
    StrategyKind kind = StrategyKind::Momentum;
    std::size_t lookback_blocks = 32;
    double aggressiveness = 1.0;
    std::size_t rebalance_cadence_blocks = 16;
    double weight_floor = 0.05;
    double weight_cap = 0.90;

    void check(std::size_t num_assets) const;
};

// Target weights from the trailing window [first_block, last_block] of the
// series, ending at the decision block. Targets always lie in
// [weight_floor, weight_cap] and sum to 1.
WeightVector momentum_targets(const PriceSeries& series,
                              std::size_t decision_block,
                              const StrategyConfig& cfg);
WeightVector channel_targets(const PriceSeries& series,
                             std::size_t decision_block,
                             const StrategyConfig& cfg);
WeightVector strategy_targets(const PriceSeries& series,
                              std::size_t decision_block,
                              const StrategyConfig& cfg);

// Projects `raw` onto {floor <= w_i <= cap, sum w_i = 1} by a uniform
// shift then clip (bisection on the shift).
Vec project_capped_simplex(const Vec& raw, double floor, double cap);

struct BacktestReport {
    std::vector<std::int64_t> timestamps;
    std::vector<double> per_block_value;
    double final_return = 0.0;
    double fees_total = 0.0;
    double arb_cost_total = 0.0;
    std::vector<double> fees_cum;
    std::vector<double> arb_cost_cum;
    SchemeLabel scheme = SchemeLabel::Linear;
    StrategyKind strategy = StrategyKind::Momentum;
    double fee_rate = 0.0;
};

// Block-level simulation: every cadence window the strategy emits new
// targets and the pool walks an interpolation trajectory (f = cadence)
// toward them, with the profit-maximizing arbitrage executed each block at
// that block's prices. Simulation starts at block index lookback_blocks.
BacktestReport run_backtest(const PriceSeries& series,
                            const StrategyConfig& strategy, SchemeLabel scheme,
                            const FeeParams& fees,
                            const PoolState& initial_pool);

// Cross product of schemes x fee rates, each cell a full run on the same
// series.
std::vector<BacktestReport> compare_schemes(
    const PriceSeries& series, const StrategyConfig& strategy,
    const std::vector<double>& fees_grid,
    const std::vector<SchemeLabel>& schemes, const PoolState& initial_pool);

// Equilibrium pool for the given prices: R_i = w_i * total_value / p_i.
PoolState equilibrium_pool(const WeightVector& weights,
                           const PriceVector& prices, double total_value,
                           std::int64_t block_index = 0);

}  // namespace tfmm
