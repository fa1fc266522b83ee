#pragma once

#include "tfmm/core_types.hpp"

namespace tfmm {

// Outcome of equilibrium-to-equilibrium reserve changes at constant prices.
// arb_cost is what the pool paid arbitrageurs: value_before - value_after.
struct ReserveUpdateResult {
    Vec new_reserves;
    double value_before = 0.0;
    double value_after = 0.0;
    double arb_cost = 0.0;
};

// Relative tolerance for the "pool quotes market prices" precondition.
constexpr double kEquilibriumTol = 1e-6;

// Closed-form post-arbitrage reserves after a single weight change at
// constant prices:
//   R'_i = R_i * (w'_i / w_i) * prod_j (w_j / w'_j)^{w'_j}.
// The pool must start at equilibrium with `prices`.
ReserveUpdateResult reserve_update(const PoolState& pool,
                                   const WeightVector& new_weights,
                                   const PriceVector& prices);

// Folds reserve_update over consecutive trajectory steps. traj.steps[0]
// must match the pool's current weights.
ReserveUpdateResult apply_trajectory(const PoolState& pool,
                                     const Trajectory& traj,
                                     const PriceVector& prices);

// The same final reserves evaluated through the multi-step product formula
// rather than the fold; exposed for cross-checking.
Vec trajectory_final_reserves(const PoolState& pool, const Trajectory& traj);

// Ratio of final reserves between the two-step weight change
// w0 -> w_mid -> wf and the direct change w0 -> wf, at constant prices.
// Token-independent scalar, always >= 1. w_mid must lie componentwise
// between the endpoints (inclusive).
double two_step_ratio(const WeightVector& w0, const WeightVector& w_mid,
                      const WeightVector& wf);

// log of the two-step/one-step ratio without the midpoint-range check,
// for callers evaluating the ratio off the feasible segment (gradients).
double log_two_step_ratio(const Vec& w0, const Vec& w_mid, const Vec& wf);

// Closed form for the linear-bisection special case
// w0 -> w0 + dw/2 -> w0 + dw:
//   prod_j (1 + dw_j / (2 w0_j))^{dw_j / 2}.
double linear_bisection_ratio(const WeightVector& w0, const Vec& delta_w);

}  // namespace tfmm
