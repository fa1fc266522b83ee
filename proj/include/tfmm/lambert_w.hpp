#pragma once

#include <cmath>

#include "tfmm/errors.hpp"

namespace tfmm {

// Principal branch of the Lambert W function on x >= 0: the w solving
// w * exp(w) = x. Halley iteration from a log-based guess for large x and
// a rational guess for small x; relative error <= 1e-14 on this domain.
// The branch point at -1/e is out of scope: negative arguments throw.
inline double lambert_w0(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("DomainError: lambert_w0 requires x >= 0");
    }
    if (x == 0.0) return 0.0;

    double w;
    if (x > 2.718281828459045) {
        // Asymptotic guess: log(x) - log(log(x)) + log(log(x))/log(x).
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    } else {
        // Pade-style guess, accurate enough for Halley on (0, e].
        w = x * (3.0 + 4.0 * x) / (3.0 + x * (7.0 + 2.5 * x));
    }

    for (int it = 0; it < 50; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double w1 = w + 1.0;
        const double delta = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1));
        w -= delta;
        if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(w))) break;
    }
    return w;
}

}  // namespace tfmm
