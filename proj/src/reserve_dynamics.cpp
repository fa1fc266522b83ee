#include "tfmm/reserve_dynamics.hpp"

#include <cmath>
#include <string>

namespace tfmm {

namespace {

void check_equilibrium(const PoolState& pool, const PriceVector& prices,
                       double tol) {
    if (pool.size() != prices.size()) {
        throw DimensionMismatch("DimensionMismatch: pool vs prices");
    }
    const std::size_t n = prices.numeraire_index;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double q = quoted_price(pool, i, n);
        const double p = prices[i];
        if (std::abs(q - p) > tol * std::abs(p)) {
            throw NotAtEquilibrium(
                "NotAtEquilibrium: token " + std::to_string(i) + " quoted " +
                std::to_string(q) + " vs market " + std::to_string(p));
        }
    }
}

// log of the token-independent factor prod_j (w_j / w'_j)^{w'_j}.
double log_step_factor(const WeightVector& w, const WeightVector& w_next) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        s += w_next[j] * (std::log(w[j]) - std::log(w_next[j]));
    }
    return s;
}

}  // namespace

ReserveUpdateResult reserve_update(const PoolState& pool,
                                   const WeightVector& new_weights,
                                   const PriceVector& prices) {
    if (new_weights.size() != pool.size()) {
        throw DimensionMismatch("DimensionMismatch: new_weights vs pool");
    }
    check_equilibrium(pool, prices, kEquilibriumTol);

    const double factor = std::exp(log_step_factor(pool.weights, new_weights));
    ReserveUpdateResult out;
    out.new_reserves.resize(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        out.new_reserves[i] =
            pool.reserves[i] * (new_weights[i] / pool.weights[i]) * factor;
    }
    out.value_before = pool_value(pool.reserves, prices);
    out.value_after = pool_value(out.new_reserves, prices);
    out.arb_cost = out.value_before - out.value_after;
    return out;
}

ReserveUpdateResult apply_trajectory(const PoolState& pool,
                                     const Trajectory& traj,
                                     const PriceVector& prices) {
    if (traj.steps.empty()) {
        throw BadLength("BadLength: empty trajectory");
    }
    const WeightVector& start = traj.steps.front();
    if (start.size() != pool.size()) {
        throw DimensionMismatch("DimensionMismatch: trajectory vs pool");
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (std::abs(start[i] - pool.weights[i]) > 1e-10) {
            throw StartMismatch(
                "StartMismatch: trajectory step 0 differs from pool weights");
        }
    }
    check_equilibrium(pool, prices, kEquilibriumTol);

    ReserveUpdateResult out;
    out.value_before = pool_value(pool.reserves, prices);

    PoolState cur = pool;
    for (std::size_t k = 1; k < traj.steps.size(); ++k) {
        ReserveUpdateResult step = reserve_update(cur, traj.steps[k], prices);
        cur = PoolState(std::move(step.new_reserves), traj.steps[k],
                        cur.block_index + 1);
    }
    out.new_reserves = cur.reserves;
    out.value_after = pool_value(out.new_reserves, prices);
    out.arb_cost = out.value_before - out.value_after;
    return out;
}

Vec trajectory_final_reserves(const PoolState& pool, const Trajectory& traj) {
    const WeightVector& w0 = traj.steps.front();
    const WeightVector& wf = traj.steps.back();
    double log_factor = 0.0;
    for (std::size_t k = 1; k < traj.steps.size(); ++k) {
        log_factor += log_step_factor(traj.steps[k - 1], traj.steps[k]);
    }
    const double factor = std::exp(log_factor);
    Vec out(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        out[i] = pool.reserves[i] * (wf[i] / w0[i]) * factor;
    }
    return out;
}

double log_two_step_ratio(const Vec& w0, const Vec& w_mid, const Vec& wf) {
    double s = 0.0;
    for (std::size_t j = 0; j < w0.size(); ++j) {
        // (wf_j - wm_j) * log(wm_j / w0_j), the log of
        // w0^{wm - wf} * wm^{wf - wm}.
        s += (wf[j] - w_mid[j]) * (std::log(w_mid[j]) - std::log(w0[j]));
    }
    return s;
}

double two_step_ratio(const WeightVector& w0, const WeightVector& w_mid,
                      const WeightVector& wf) {
    if (w0.size() != wf.size() || w0.size() != w_mid.size()) {
        throw DimensionMismatch("DimensionMismatch: weight vector lengths");
    }
    for (std::size_t j = 0; j < w0.size(); ++j) {
        const double lo = std::min(w0[j], wf[j]);
        const double hi = std::max(w0[j], wf[j]);
        // Small slack so exact endpoints survive floating-point noise.
        const double slack = 1e-14 * (1.0 + hi);
        if (w_mid[j] < lo - slack || w_mid[j] > hi + slack) {
            throw MidpointOutOfRange(
                "MidpointOutOfRange: component " + std::to_string(j) +
                " of w_mid outside [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
        }
    }
    return std::exp(
        log_two_step_ratio(w0.weights(), w_mid.weights(), wf.weights()));
}

double linear_bisection_ratio(const WeightVector& w0, const Vec& delta_w) {
    if (delta_w.size() != w0.size()) {
        throw DimensionMismatch("DimensionMismatch: delta_w vs w0");
    }
    double sum = 0.0;
    Vec end(w0.size());
    for (std::size_t j = 0; j < w0.size(); ++j) {
        sum += delta_w[j];
        end[j] = w0[j] + delta_w[j];
    }
    if (std::abs(sum) > 1e-9) {
        throw InvalidDelta("InvalidDelta: delta_w components must sum to 0");
    }
    // Endpoint must itself be a valid weight vector.
    try {
        WeightVector::validate(end, w0.epsilon_bound());
    } catch (const ValidationError& e) {
        throw InvalidDelta(std::string("InvalidDelta: w0 + delta_w invalid: ") +
                           e.what());
    }
    double log_r = 0.0;
    for (std::size_t j = 0; j < w0.size(); ++j) {
        log_r += 0.5 * delta_w[j] * std::log1p(delta_w[j] / (2.0 * w0[j]));
    }
    return std::exp(log_r);
}

}  // namespace tfmm
