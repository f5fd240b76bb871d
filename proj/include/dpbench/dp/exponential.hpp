#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dpbench/errors.hpp"
#include "dpbench/rng.hpp"

namespace dpbench {

/// Selection probabilities of the exponential mechanism:
/// P(i) proportional to exp(epsilon * score_i / (2 * score_sensitivity)).
inline std::vector<double> exponential_mechanism_probabilities(std::span<const double> scores, double epsilon,
                                                               double score_sensitivity) {
    detail::require(!scores.empty(), "exponential_mechanism: no candidates");
    detail::require(epsilon >= 0.0 && score_sensitivity > 0.0, "exponential_mechanism: bad epsilon or sensitivity");
    const double factor = epsilon / (2.0 * score_sensitivity);
    std::vector<double> w(scores.size());
    double top = -INFINITY;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        detail::require(std::isfinite(scores[i]), "exponential_mechanism: scores must be finite");
        w[i] = factor * scores[i];
        top = std::max(top, w[i]);
    }
    double total = 0.0;
    for (auto& v : w) {
        v = std::exp(v - top);
        total += v;
    }
    for (auto& v : w) v /= total;
    return w;
}

/// Index of the chosen candidate. The log-sum-exp shift keeps huge epsilons stable.
inline std::size_t exponential_mechanism(std::span<const double> scores, double epsilon, double score_sensitivity,
                                         rng_stream& rng) {
    const auto probs = exponential_mechanism_probabilities(scores, epsilon, score_sensitivity);
    double u = rng.uniform();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (u < probs[i]) return i;
        u -= probs[i];
    }
    // Rounding left a sliver of mass; fall back to the last candidate with positive weight.
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return i;
    return probs.size() - 1;
}

template <typename T>
const T& exponential_mechanism(std::span<const T> candidates, std::span<const double> scores, double epsilon,
                               double score_sensitivity, rng_stream& rng) {
    detail::require(candidates.size() == scores.size(), "exponential_mechanism: one score per candidate");
    return candidates[exponential_mechanism(scores, epsilon, score_sensitivity, rng)];
}

} // namespace dpbench
