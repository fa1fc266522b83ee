#pragma once

#include "tfmm/core_types.hpp"

namespace tfmm {

struct InterpolationRequest {
    WeightVector w_start;
    WeightVector w_end;
    std::size_t num_steps = 1;  // f; the trajectory has f+1 entries

    InterpolationRequest(WeightVector start, WeightVector end,
                         std::size_t f);
};

// Componentwise unconstrained optimum of the two-step ratio in the
// small-change limit:
//   wt_i = wf_i / W0(e * wf_i / w0_i).
// Not renormalized onto the simplex; callers wanting a feasible point
// renormalize explicitly.
Vec optimal_intermediate(const WeightVector& w0, const WeightVector& wf);

// Analytic gradient of the two-step ratio with respect to the intermediate
// point: dr/dwt_i = r * (wf_i / wt_i + log(w0_i / wt_i) - 1).
// w_mid only needs to be strictly inside (0,1)^N, not on the simplex.
Vec d_r_d_wtilde(const WeightVector& w0, const Vec& w_mid,
                 const WeightVector& wf);

// w_i(t_k) = (1 - k/f) w_i(0) + (k/f) w_i(f). Each step is an affine
// combination of simplex points, so it sums to 1 automatically.
Trajectory linear_trajectory(const InterpolationRequest& req);

// Raw geometric interpolants w_i(0)^{1-k/f} w_i(f)^{k/f}. These do not sum
// to 1 in general; `normalized` divides each step by its sum for
// standalone use.
struct GeometricCurve {
    std::vector<Vec> raw;
    Trajectory normalized;
};
GeometricCurve geometric_trajectory(const InterpolationRequest& req);

// Approximately-optimal trajectory: at each step, the normalized average of
// the linear and raw-geometric interpolants,
//   w_i(t_k) = (w_i^AM + w_i^GM) / sum_j (w_j^AM + w_j^GM).
Trajectory approx_optimal_trajectory(const InterpolationRequest& req);

// Jump to the end weights at the first step, then hold. Same length as the
// other schemes so backtests can swap them freely.
Trajectory one_step_trajectory(const InterpolationRequest& req);

Trajectory make_trajectory(const InterpolationRequest& req, SchemeLabel s);

}  // namespace tfmm
