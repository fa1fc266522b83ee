#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfmm/core_types.hpp"

namespace tfmm {

// Per-block market prices for N tokens, numeraire-denominated. The
// numeraire column is constant 1.
struct PriceSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<Vec> prices;  // T rows of N
    std::vector<std::string> symbols;
    std::size_t numeraire_index = 0;

    std::size_t num_blocks() const { return timestamps.size(); }
    std::size_t num_assets() const {
        return prices.empty() ? 0 : prices.front().size();
    }

    PriceVector at(std::size_t t) const {
        return PriceVector(prices[t], numeraire_index);
    }

    void check() const;
};

// Loads `timestamp,<sym1>,...,<symN>` CSV. If `numeraire_symbol` is absent
// from the header a constant-1 column of that name is appended; if present
// its values must all be 1.
PriceSeries load_price_csv(const std::string& path,
                           const std::string& numeraire_symbol = "NUMERAIRE");

// Deterministic 64-bit linear congruential generator used by the synthetic
// price paths. Constants (Knuth MMIX): mult 6364136223846793005,
// inc 1442695040888963407; uniforms take the top 53 bits.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    // Uniform on (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (consumes two uniforms).
    double next_normal();

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SyntheticConfig {
    std::size_t num_blocks = 1024;
    std::size_t num_assets = 3;  // including the numeraire column
    double drift = 0.0;          // per-block log-price drift
    double volatility = 0.01;    // per-block log-price stddev
    std::uint64_t seed = 1;
};

// Per-asset geometric random walk: log p(t+1) = log p(t) + drift -
// volatility^2/2 + volatility * z, z drawn asset-by-asset then
// block-by-block from Lcg64(seed). Asset 0 is the numeraire (constant 1).
PriceSeries synthetic_random_walk(const SyntheticConfig& cfg);

// Holds each cadence window's first price for the whole window; makes
// prices piecewise-constant so scheme orderings are deterministic.
PriceSeries piecewise_constant(const PriceSeries& series,
                               std::size_t window_blocks);

}  // namespace tfmm
