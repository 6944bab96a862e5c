#pragma once

#include <cmath>

namespace curvnorm::detail {

// Integer exponents (the common case for even n) avoid libm pow.
inline double rpow(double x, double p) {
    const double r = std::round(p);
    if (r == p && std::abs(r) <= 16.0) {
        int k = static_cast<int>(std::abs(r));
        double base = x, acc = 1.0;
        while (k > 0) {
            if (k & 1) acc *= base;
            base *= base;
            k >>= 1;
        }
        return r < 0 ? 1.0 / acc : acc;
    }
    return std::pow(x, p);
}

}  // namespace curvnorm::detail
