/// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include "ymh/geometry.hpp"

#include <cmath>

namespace ymh::oracles {

/// Closed-form sphere monomial moments: ∫_{Sⁿ} Π x_i^{a_i} dV.
/// Zero when any exponent is odd; otherwise 2·Π Γ((a_i+1)/2) / Γ((|a|+n+1)/2).
inline double sphere_monomial_moment(int n, const std::vector<int>& alpha) {
    int total = 0;
    for (int a : alpha) {
        if (a % 2 == 1) return 0.0;
        total += a;
    }
    double lognum = std::log(2.0);
    for (int i = 0; i <= n; ++i) {
        const int a = i < static_cast<int>(alpha.size()) ? alpha[static_cast<size_t>(i)] : 0;
        lognum += std::lgamma(0.5 * (a + 1));
    }
    lognum -= std::lgamma(0.5 * (total + n + 1));
    return std::exp(lognum);
}

inline double sphere_volume(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

} // namespace ymh::oracles
