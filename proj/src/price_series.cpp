#include "tfmm/price_series.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tfmm {

void PriceSeries::check() const {
    if (timestamps.size() != prices.size()) {
        throw DimensionMismatch("DimensionMismatch: timestamps vs price rows");
    }
    const std::size_t n = num_assets();
    if (numeraire_index >= n) {
        throw IndexOutOfRange("IndexOutOfRange: numeraire column");
    }
    for (std::size_t t = 0; t < prices.size(); ++t) {
        if (t > 0 && timestamps[t] <= timestamps[t - 1]) {
            throw ValidationError("timestamps must be strictly increasing");
        }
        if (prices[t].size() != n) {
            throw DimensionMismatch("DimensionMismatch: ragged price rows");
        }
        for (double p : prices[t]) {
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw OutOfBounds("OutOfBounds: prices must be positive");
            }
        }
        if (prices[t][numeraire_index] != 1.0) {
            throw OutOfBounds("OutOfBounds: numeraire column must be 1");
        }
    }
}

PriceSeries load_price_csv(const std::string& path,
                           const std::string& numeraire_symbol) {
    std::ifstream in(path);
    if (!in) {
        throw CsvParseError("cannot open price CSV: " + path);
    }
    PriceSeries s;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw CsvParseError(path + ": empty file");
    }
    ++line_no;
    {
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',') || field != "timestamp") {
            throw CsvParseError(path + ":1: header must start with 'timestamp'");
        }
        while (std::getline(ss, field, ',')) s.symbols.push_back(field);
        if (s.symbols.empty()) {
            throw CsvParseError(path + ":1: no symbol columns");
        }
    }
    bool numeraire_present = false;
    for (std::size_t i = 0; i < s.symbols.size(); ++i) {
        if (s.symbols[i] == numeraire_symbol) {
            numeraire_present = true;
            s.numeraire_index = i;
        }
    }
    if (!numeraire_present) {
        s.numeraire_index = s.symbols.size();
        s.symbols.push_back(numeraire_symbol);
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        Vec row;
        row.reserve(s.symbols.size());
        std::int64_t ts = 0;
        std::size_t col = 0;
        while (std::getline(ss, field, ',')) {
            try {
                if (col == 0) {
                    ts = std::stoll(field);
                } else {
                    row.push_back(std::stod(field));
                }
            } catch (const std::exception&) {
                throw CsvParseError(path + ":" + std::to_string(line_no) +
                                    ": bad field '" + field + "'");
            }
            ++col;
        }
        if (!numeraire_present) row.push_back(1.0);
        if (row.size() != s.symbols.size()) {
            throw CsvParseError(path + ":" + std::to_string(line_no) +
                                ": expected " +
                                std::to_string(s.symbols.size() + 1) +
                                " fields, got " + std::to_string(col));
        }
        s.timestamps.push_back(ts);
        s.prices.push_back(std::move(row));
    }
    s.check();
    return s;
}

double Lcg64::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586;
    spare_ = mag * std::sin(two_pi * u2);
    have_spare_ = true;
    return mag * std::cos(two_pi * u2);
}

PriceSeries synthetic_random_walk(const SyntheticConfig& cfg) {
    if (cfg.num_assets < 2) {
        throw BadLength("BadLength: synthetic series needs >= 2 assets");
    }
    PriceSeries s;
    s.numeraire_index = 0;
    s.symbols.push_back("NUMERAIRE");
    for (std::size_t i = 1; i < cfg.num_assets; ++i) {
        s.symbols.push_back("ASSET" + std::to_string(i));
    }
    Lcg64 rng(cfg.seed);
    Vec log_p(cfg.num_assets, 0.0);
    const double step_mean = cfg.drift - 0.5 * cfg.volatility * cfg.volatility;
    for (std::size_t t = 0; t < cfg.num_blocks; ++t) {
        Vec row(cfg.num_assets);
        row[0] = 1.0;
        for (std::size_t i = 1; i < cfg.num_assets; ++i) {
            if (t > 0) {
                log_p[i] += step_mean + cfg.volatility * rng.next_normal();
            }
            row[i] = std::exp(log_p[i]);
        }
        s.timestamps.push_back(static_cast<std::int64_t>(t));
        s.prices.push_back(std::move(row));
    }
    s.check();
    return s;
}

PriceSeries piecewise_constant(const PriceSeries& series,
                               std::size_t window_blocks) {
    if (window_blocks < 1) {
        throw BadLength("BadLength: window_blocks must be >= 1");
    }
    PriceSeries s = series;
    for (std::size_t t = 0; t < s.prices.size(); ++t) {
        s.prices[t] = series.prices[t - t % window_blocks];
    }
    return s;
}

}  // namespace tfmm
