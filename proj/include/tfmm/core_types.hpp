#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tfmm/errors.hpp"

namespace tfmm {

using Vec = std::vector<double>;

// Point on the open N-simplex. Components sum to 1 and are kept strictly
// inside (epsilon_bound, 1 - epsilon_bound). Construct via validate();
// immutable afterwards.
class WeightVector {
public:
    static constexpr double kDefaultEpsilon = 1e-6;

    // Input tolerance on the component sum. Inputs further from 1 than this
    // are rejected rather than repaired.
    static constexpr double kSumInputTol = 1e-9;

    static WeightVector validate(const Vec& raw,
                                 double epsilon_bound = kDefaultEpsilon);

    const Vec& weights() const { return weights_; }
    double epsilon_bound() const { return epsilon_bound_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

    bool operator==(const WeightVector& other) const {
        return weights_ == other.weights_;
    }

private:
    WeightVector(Vec w, double eps)
        : weights_(std::move(w)), epsilon_bound_(eps) {}

    Vec weights_;
    double epsilon_bound_;
};

// Convenience free-function form of the validator.
inline WeightVector validate_weights(const Vec& raw,
                                     double epsilon_bound =
                                         WeightVector::kDefaultEpsilon) {
    return WeightVector::validate(raw, epsilon_bound);
}

// Pool reserves plus the weights currently exposed to the market.
// The invariant k = prod R_i^{w_i} is derived on demand, never stored.
struct PoolState {
    Vec reserves;
    WeightVector weights;
    std::int64_t block_index = 0;

    PoolState(Vec reserves_in, WeightVector weights_in,
              std::int64_t block = 0);

    std::size_t size() const { return reserves.size(); }
};

// Market prices in numeraire units. prices[numeraire_index] is exactly 1.
struct PriceVector {
    Vec prices;
    std::size_t numeraire_index = 0;

    PriceVector(Vec prices_in, std::size_t numeraire = 0);

    std::size_t size() const { return prices.size(); }
    double operator[](std::size_t i) const { return prices[i]; }
};

enum class SchemeLabel {
    OneStep,
    Linear,
    Geometric,
    ApproxOptimal,
    NumericalOptimal,
};

const char* scheme_name(SchemeLabel s);
SchemeLabel scheme_from_name(const std::string& name);

// Ordered sequence of f+1 weight vectors, indexed k = 0..f.
struct Trajectory {
    std::vector<WeightVector> steps;
    SchemeLabel scheme = SchemeLabel::Linear;

    std::size_t num_segments() const { return steps.size() - 1; }
};

// Pool-quoted price of token i in units of token `numeraire`:
// (w_i / R_i) / (w_n / R_n). Returns 1 when i == numeraire.
double quoted_price(const PoolState& pool, std::size_t i,
                    std::size_t numeraire);

// Mark-to-market value of the reserves, p . R.
double pool_value(const PoolState& pool, const PriceVector& prices);
double pool_value(const Vec& reserves, const PriceVector& prices);

}  // namespace tfmm
