#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dpbench/errors.hpp"

namespace dpbench {

/// Sequential composition: part i = epsilon * fractions[i]. The fractions may leave
/// budget unspent but may not exceed one in total.
inline std::vector<double> split_budget(double epsilon, const std::vector<double>& fractions) {
    detail::require(std::isfinite(epsilon) && epsilon >= 0.0, "split_budget: epsilon must be finite and non-negative");
    double total = 0.0;
    for (double f : fractions) {
        detail::require(f >= 0.0 && std::isfinite(f), "split_budget: fractions must be non-negative");
        total += f;
    }
    if (total > 1.0 + 1e-12) throw composition_violation("split_budget: fractions sum to more than the whole budget");
    std::vector<double> parts;
    parts.reserve(fractions.size());
    for (double f : fractions) parts.push_back(epsilon * f);
    return parts;
}

/// Records every epsilon a mechanism spends, stage by stage.
class budget_ledger {
public:
    struct entry {
        std::string stage;
        double epsilon;
    };

    void spend(std::string stage, double epsilon) {
        detail::require(epsilon >= 0.0 && std::isfinite(epsilon), "budget_ledger: spend must be non-negative");
        entries_.push_back({std::move(stage), epsilon});
    }

    double total() const {
        return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                               [](double acc, const entry& e) { return acc + e.epsilon; });
    }

    const std::vector<entry>& entries() const noexcept { return entries_; }
    void clear() noexcept { entries_.clear(); }

    /// True when the recorded stages add up to `epsilon` up to floating-point rounding.
    bool balances(double epsilon, double rel_tol = 1e-12) const {
        return std::abs(total() - epsilon) <= rel_tol * std::max(1.0, std::abs(epsilon));
    }

private:
    std::vector<entry> entries_;
};

} // namespace dpbench
