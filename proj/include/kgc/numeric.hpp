#pragma once

#include <cmath>
#include <span>

namespace kgc {

// Neumaier-compensated sum; order of accumulation is the span order.
inline double compensated_sum(std::span<const double> values) noexcept {
    double sum = 0.0;
    double carry = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

}  // namespace kgc
