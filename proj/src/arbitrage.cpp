#include "tfmm/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfmm {

FeeParams FeeParams::from_rate(double rate) {
    if (!(rate >= 0.0) || rate >= 1.0) {
        throw OutOfBounds("OutOfBounds: fee_rate must be in [0, 1)");
    }
    FeeParams f;
    f.fee_rate = rate;
    f.gamma = 1.0 - rate;
    return f;
}

namespace {

// Post-trade invariant-surface point for a given multiplier lambda.
// Stationarity of profit p.(out - in) - lambda * (invariant) gives, per
// token: sell leg x = lambda w/p (pool pays out, marginal value p), buy
// leg x = gamma lambda w/p (fee-discounted input), and a hold band
// between the two where the token does not trade.
double surface_coord(double lambda, double r, double w, double p,
                     double gamma) {
    const double sell = lambda * w / p;
    if (sell < r) return sell;
    const double buy = gamma * lambda * w / p;
    if (buy > r) return buy;
    return r;
}

}  // namespace

ArbOutcome arb_to_equilibrium(const PoolState& pool, const PriceVector& prices,
                              const FeeParams& fees) {
    if (pool.size() != prices.size()) {
        throw DimensionMismatch("DimensionMismatch: pool vs prices");
    }
    const std::size_t n = pool.size();
    const double gamma = fees.gamma;
    const Vec& r = pool.reserves;
    const WeightVector& w = pool.weights;

    ArbOutcome out(pool);
    out.trade_deltas.assign(n, 0.0);

    // No-arb band: a multiplier consistent with every token holding.
    double band_lo = 0.0, band_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        band_lo = std::max(band_lo, prices[i] * r[i] / w[i]);
        band_hi = std::min(band_hi, prices[i] * r[i] / (gamma * w[i]));
    }
    if (band_lo <= band_hi) {
        return out;  // inside the band, no profitable trade exists
    }

    // h(lambda) = sum w_i log x_i(lambda) - log k, monotone increasing.
    double log_k = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_k += w[i] * std::log(r[i]);
    auto h = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += w[i] *
                 std::log(surface_coord(lambda, r[i], w[i], prices[i], gamma));
        }
        return s - log_k;
    };

    double lo = gamma * band_lo, hi = band_lo;
    while (h(lo) > 0.0) lo *= 0.5;
    while (h(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    // Reconstruct the trade from the surface point.
    double profit = 0.0, fees_value = 0.0;
    Vec deltas(n, 0.0), new_reserves(r);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = surface_coord(lambda, r[i], w[i], prices[i], gamma);
        if (x < r[i]) {
            const double paid_out = r[i] - x;
            deltas[i] = -paid_out;
            new_reserves[i] = x;
            profit += prices[i] * paid_out;
        } else if (x > r[i]) {
            const double sent_in = (x - r[i]) / gamma;
            deltas[i] = sent_in;
            new_reserves[i] = r[i] + sent_in;
            profit -= prices[i] * sent_in;
            fees_value += prices[i] * (1.0 - gamma) * sent_in;
        }
    }

    const double threshold = 1e-12 * pool_value(pool, prices);
    if (profit <= threshold) {
        return out;  // churn guard: ignore float-noise "profits"
    }

    out.traded = true;
    out.trade_deltas = std::move(deltas);
    out.arb_profit = profit;
    out.fees_accrued = fees_value;
    out.pool_after =
        PoolState(std::move(new_reserves), pool.weights, pool.block_index);
    return out;
}

}  // namespace tfmm
