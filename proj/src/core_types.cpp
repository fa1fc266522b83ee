#include "tfmm/core_types.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace tfmm {

WeightVector WeightVector::validate(const Vec& raw, double epsilon_bound) {
    if (raw.size() < 2) {
        throw BadLength("BadLength: weight vector needs N >= 2, got N = " +
                        std::to_string(raw.size()));
    }
    if (!(epsilon_bound > 0.0)) {
        throw OutOfBounds("OutOfBounds: epsilon_bound must be > 0");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double w = raw[i];
        if (!std::isfinite(w) || w <= epsilon_bound ||
            w >= 1.0 - epsilon_bound) {
            throw OutOfBounds(
                "OutOfBounds: component " + std::to_string(i) + " = " +
                std::to_string(w) + " not in (" +
                std::to_string(epsilon_bound) + ", 1 - " +
                std::to_string(epsilon_bound) + ")");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > kSumInputTol) {
        throw SumNotOne("SumNotOne: components sum to " + std::to_string(sum));
    }
    Vec w = raw;
    // Renormalize only when needed so validation is idempotent.
    if (std::abs(sum - 1.0) > 1e-12) {
        for (double& x : w) x /= sum;
    }
    return WeightVector(std::move(w), epsilon_bound);
}

PoolState::PoolState(Vec reserves_in, WeightVector weights_in,
                     std::int64_t block)
    : reserves(std::move(reserves_in)),
      weights(std::move(weights_in)),
      block_index(block) {
    if (reserves.size() != weights.size()) {
        throw DimensionMismatch("DimensionMismatch: " +
                                std::to_string(reserves.size()) +
                                " reserves vs " +
                                std::to_string(weights.size()) + " weights");
    }
    for (double r : reserves) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw OutOfBounds("OutOfBounds: reserves must be strictly positive");
        }
    }
}

PriceVector::PriceVector(Vec prices_in, std::size_t numeraire)
    : prices(std::move(prices_in)), numeraire_index(numeraire) {
    if (numeraire_index >= prices.size()) {
        throw IndexOutOfRange("IndexOutOfRange: numeraire index " +
                              std::to_string(numeraire_index));
    }
    for (double p : prices) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw OutOfBounds("OutOfBounds: prices must be strictly positive");
        }
    }
    if (prices[numeraire_index] != 1.0) {
        throw OutOfBounds("OutOfBounds: numeraire price must be exactly 1");
    }
}

const char* scheme_name(SchemeLabel s) {
    switch (s) {
        case SchemeLabel::OneStep: return "one-step";
        case SchemeLabel::Linear: return "linear";
        case SchemeLabel::Geometric: return "geometric";
        case SchemeLabel::ApproxOptimal: return "approx-optimal";
        case SchemeLabel::NumericalOptimal: return "numerical-optimal";
    }
    return "unknown";
}

SchemeLabel scheme_from_name(const std::string& name) {
    if (name == "one-step" || name == "onestep") return SchemeLabel::OneStep;
    if (name == "linear") return SchemeLabel::Linear;
    if (name == "geometric") return SchemeLabel::Geometric;
    if (name == "approx-optimal" || name == "approx")
        return SchemeLabel::ApproxOptimal;
    if (name == "numerical-optimal" || name == "optimal")
        return SchemeLabel::NumericalOptimal;
    throw ValidationError("unknown scheme name: " + name);
}

double quoted_price(const PoolState& pool, std::size_t i,
                    std::size_t numeraire) {
    if (i >= pool.size() || numeraire >= pool.size()) {
        throw IndexOutOfRange("IndexOutOfRange: token index out of range");
    }
    if (i == numeraire) return 1.0;
    const double wi = pool.weights[i];
    const double wn = pool.weights[numeraire];
    return (wi / pool.reserves[i]) / (wn / pool.reserves[numeraire]);
}

double pool_value(const Vec& reserves, const PriceVector& prices) {
    if (reserves.size() != prices.size()) {
        throw DimensionMismatch("DimensionMismatch: reserves vs prices");
    }
    double v = 0.0;
    for (std::size_t i = 0; i < reserves.size(); ++i) {
        v += reserves[i] * prices[i];
    }
    return v;
}

double pool_value(const PoolState& pool, const PriceVector& prices) {
    return pool_value(pool.reserves, prices);
}

}  // namespace tfmm
