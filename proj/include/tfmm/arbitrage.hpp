#pragma once

#include "tfmm/core_types.hpp"

namespace tfmm {

// Proportional fee charged on amounts sent into the pool. gamma = 1 -
// fee_rate is the retention factor; gamma = 1 means zero fees.
struct FeeParams {
    double fee_rate = 0.0;
    double gamma = 1.0;

    static FeeParams from_rate(double rate);
};

struct ArbOutcome {
    bool traded = false;
    // Net reserve change per token; positive = tokens into the pool.
    Vec trade_deltas;
    PoolState pool_after;
    double arb_profit = 0.0;     // numeraire units
    double fees_accrued = 0.0;   // numeraire-equivalent value of fees kept

    explicit ArbOutcome(PoolState pool) : pool_after(std::move(pool)) {}
};

// Executes the profit-maximizing arbitrage trade against the pool at the
// given market prices, or no trade if the pool sits inside the no-arb
// band. The trade maximizes p.(out - in) subject to the fee-adjusted
// invariant; solved by a bisection on the KKT multiplier of the invariant
// constraint (the profit objective is concave on the trading surface, so
// the stationarity system has a unique root).
ArbOutcome arb_to_equilibrium(const PoolState& pool, const PriceVector& prices,
                              const FeeParams& fees);

}  // namespace tfmm
