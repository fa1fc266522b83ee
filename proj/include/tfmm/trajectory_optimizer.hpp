#pragma once

#include <cstdint>

#include "tfmm/core_types.hpp"
#include "tfmm/trajectory_schemes.hpp"

namespace tfmm {

struct OptimizerConfig {
    int max_iterations = 5000;
    // Stationarity threshold on the simplex-projected gradient norm of the
    // objective p.R(t_f). <= 0 means "auto": 1e-10 * initial pool value.
    double gradient_tolerance = 0.0;
    double step_size = 0.1;
    double step_decay = 0.5;
    double epsilon_bound = WeightVector::kDefaultEpsilon;
    std::uint64_t seed = 0;
};

struct OptimizerResult {
    Trajectory trajectory;
    double final_value = 0.0;
    int iterations_used = 0;
    bool converged = false;
    std::vector<double> objective_history;
};

// Gradient of the final pool value p.R(t_f) (closed-form multi-step
// product, constant prices) with respect to each interior step's weights.
// Returned as one Vec per interior index k = 1..f-1.
std::vector<Vec> trajectory_objective_gradient(const Trajectory& traj,
                                               const PoolState& pool,
                                               const PriceVector& prices);

// Maximizes p.R(t_f) over the interior trajectory weights, endpoints
// fixed. Interior steps live on the simplex via a softmax
// reparametrization; ascent directions use Polak-Ribiere conjugate
// gradients with Armijo backtracking, so the objective history is
// non-decreasing. Initialized at the approx-optimal trajectory.
// Never throws on non-convergence: returns best-so-far with
// converged=false.
OptimizerResult optimize_trajectory(const InterpolationRequest& req,
                                    const PoolState& pool,
                                    const PriceVector& prices,
                                    const OptimizerConfig& cfg = {});

}  // namespace tfmm
