#pragma once

// PHP: recursive bisection chosen by the exponential mechanism, then noisy bucket counts.

#include <vector>

#include "dpbench/algo/partition.hpp"
#include "dpbench/algo/result.hpp"
#include "dpbench/dp/exponential.hpp"
#include "dpbench/dp/haar.hpp"

namespace dpbench {

/// Number of bisection rounds PHP performs on a domain of n cells: ceil(log2 n).
inline std::size_t php_max_iterations(std::size_t n) {
    std::size_t r = 0;
    while ((std::size_t{1} << r) < n) ++r;
    return r;
}

/// Split scores for interval [lo, hi): score of cut m (lo < m < hi) is minus the
/// absolute deviation of [lo, m) plus that of [m, hi).
inline std::vector<double> php_split_scores(std::span<const double> x, std::size_t lo, std::size_t hi) {
    const std::size_t len = hi - lo;
    std::vector<double> left(len, 0.0), right(len, 0.0);
    const std::span<const double> part = x.subspan(lo, len);
    deviation_tracker t(part);
    for (std::size_t m = 1; m < len; ++m) {
        t.insert(m - 1);
        left[m] = t.deviation();
    }
    t.clear();
    for (std::size_t m = len; m-- > 1;) {
        t.insert(m);
        right[m] = t.deviation();
    }
    std::vector<double> scores(len - 1);
    for (std::size_t m = 1; m < len; ++m) scores[m - 1] = -(left[m] + right[m]);
    return scores;
}

/// Buckets from the private bisection, using `epsilon` in total (epsilon / rounds per round).
inline std::vector<std::pair<std::size_t, std::size_t>> php_partition(std::span<const double> x, double epsilon,
                                                                       rng_stream& rng) {
    const std::size_t rounds = php_max_iterations(x.size());
    std::vector<std::pair<std::size_t, std::size_t>> current{{0, x.size()}};
    if (rounds == 0) return current;
    const double per_round = epsilon / static_cast<double>(rounds);
    for (std::size_t r = 0; r < rounds; ++r) {
        std::vector<std::pair<std::size_t, std::size_t>> next;
        bool split_any = false;
        for (const auto& [lo, hi] : current) {
            if (hi - lo < 2) {
                next.emplace_back(lo, hi);
                continue;
            }
            const auto scores = php_split_scores(x, lo, hi);
            const std::size_t cut = lo + 1 + exponential_mechanism(scores, per_round, 2.0, rng);
            next.emplace_back(lo, cut);
            next.emplace_back(cut, hi);
            split_any = true;
        }
        current = std::move(next);
        if (!split_any) break;
    }
    return current;
}

inline mechanism_result php_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                double rho = 0.5) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(x.dom().dims() == 1, "php: 1D data required");
    detail::require(rho > 0.0 && rho < 1.0, "php: rho must lie in (0, 1)");
    const double start = ctx.spent();
    const double eps1 = rho * epsilon;
    const double eps2 = epsilon - eps1;
    const auto values = x.as_reals();
    partition p;
    p.buckets = php_partition(values, eps1, ctx.rng());
    ctx.spend("partition", eps1);
    p.counts = bucket_sums(x.counts(), p.buckets);
    for (auto& c : p.counts) c += ctx.rng().laplace(1.0 / eps2);
    ctx.spend("bucket counts", eps2);
    return detail::finish(w, x.dom(), expand_uniform(p, x.size()), ctx.spent() - start);
}

} // namespace dpbench
