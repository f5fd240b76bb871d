#pragma once

#include <cmath>
#include <vector>

#include "dpbench/errors.hpp"
#include "dpbench/rng.hpp"

namespace dpbench {

/// `length` independent draws from Laplace(0, sensitivity / epsilon).
inline std::vector<double> laplace_vector(double sensitivity, double epsilon, std::size_t length, rng_stream& rng) {
    detail::require(sensitivity > 0.0 && std::isfinite(sensitivity), "laplace_vector: sensitivity must be positive");
    detail::require(epsilon > 0.0 && std::isfinite(epsilon), "laplace_vector: epsilon must be positive");
    const double b = sensitivity / epsilon;
    std::vector<double> out(length);
    for (auto& v : out) v = rng.laplace(b);
    return out;
}

/// Variance of Laplace(0, b).
inline constexpr double laplace_variance(double b) noexcept { return 2.0 * b * b; }

} // namespace dpbench
