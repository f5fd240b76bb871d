#pragma once

// AHP: noisy cell counts, thresholding, greedy clustering of sorted values, then noisy
// cluster totals. Works on any number of dimensions since clusters need not be contiguous.

#include <algorithm>
#include <numeric>
#include <vector>

#include "dpbench/algo/partition.hpp"
#include "dpbench/algo/result.hpp"

namespace dpbench {

struct ahp_options {
    double rho = 0.5;
    double eta = 1.0;
};

/// Greedy clustering: cells sorted by value (ties by index) are merged into the running
/// cluster while its spread stays within `threshold`.
inline std::vector<std::vector<std::size_t>> ahp_cluster(std::span<const double> values, double threshold) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<std::size_t>> clusters;
    double low = 0.0;
    for (auto c : order) {
        if (clusters.empty() || values[c] - low > threshold) {
            clusters.push_back({c});
            low = values[c];
        } else {
            clusters.back().push_back(c);
        }
    }
    return clusters;
}

inline mechanism_result ahp_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                const ahp_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(opts.rho > 0.0 && opts.rho < 1.0, "ahp: rho must lie in (0, 1)");
    detail::require(opts.eta >= 0.0, "ahp: eta must be non-negative");
    const double start = ctx.spent();
    const double eps1 = opts.rho * epsilon;
    const double eps2 = epsilon - eps1;
    const double threshold = opts.eta / eps1;

    auto noisy = x.as_reals();
    for (auto& v : noisy) {
        v += ctx.rng().laplace(1.0 / eps1);
        if (v < threshold) v = 0.0;
    }
    ctx.spend("noisy cells", eps1);
    const auto clusters = ahp_cluster(noisy, threshold);

    std::vector<double> totals(clusters.size(), 0.0);
    for (std::size_t g = 0; g < clusters.size(); ++g) {
        for (auto c : clusters[g]) totals[g] += static_cast<double>(x[c]);
        totals[g] += ctx.rng().laplace(1.0 / eps2);
    }
    ctx.spend("cluster totals", eps2);
    return detail::finish(w, x.dom(), expand_groups(clusters, totals, x.size()), ctx.spent() - start);
}

} // namespace dpbench
