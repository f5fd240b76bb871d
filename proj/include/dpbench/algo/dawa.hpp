#pragma once

// DAWA: a least-cost partition from noisy interval deviations, then Greedy-H on the
// bucket counts. 2D inputs are linearized along a Hilbert curve first.

#include <bit>
#include <functional>
#include <limits>
#include <vector>

#include "dpbench/algo/hierarchical.hpp"
#include "dpbench/algo/hilbert.hpp"
#include "dpbench/algo/partition.hpp"
#include "dpbench/algo/result.hpp"

namespace dpbench {

struct dawa_options {
    double rho = 0.25;
    std::size_t branching = 2;
    /// Beyond this many cells only intervals with power-of-two lengths are considered.
    std::size_t all_intervals_limit = 4096;
};

namespace detail {

/// Least-cost partition of [0, n): cost of bucket [i, j) is deviation(i, j) plus
/// noise(i, j) plus `penalty`. Equal costs prefer fewer buckets. Noise is requested in
/// a fixed order (start ascending, then end ascending).
inline std::vector<std::pair<std::size_t, std::size_t>>
dawa_dp(std::span<const double> x, double penalty, const std::function<double()>& noise, bool dyadic_only) {
    const std::size_t n = x.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(n + 1, inf);
    std::vector<std::size_t> pieces(n + 1, 0), from(n + 1, 0);
    best[0] = 0.0;
    auto relax = [&](std::size_t i, std::size_t j, double deviation) {
        const double cost = best[i] + deviation + noise() + penalty;
        const std::size_t count = pieces[i] + 1;
        if (cost < best[j] || (cost == best[j] && count < pieces[j])) {
            best[j] = cost;
            pieces[j] = count;
            from[j] = i;
        }
    };
    if (!dyadic_only) {
        deviation_tracker t(x);
        for (std::size_t i = 0; i < n; ++i) {
            t.clear();
            for (std::size_t j = i + 1; j <= n; ++j) {
                t.insert(j - 1);
                relax(i, j, t.deviation());
            }
        }
    } else {
        // dev[k][i]: deviation of [i, i + 2^k), from a sliding window per length.
        std::vector<std::vector<double>> dev;
        deviation_tracker t(x);
        for (std::size_t len = 1; len <= n; len *= 2) {
            std::vector<double> row(n - len + 1);
            t.clear();
            for (std::size_t j = 0; j < len; ++j) t.insert(j);
            row[0] = t.deviation();
            for (std::size_t i = 1; i + len <= n; ++i) {
                t.erase(i - 1);
                t.insert(i + len - 1);
                row[i] = t.deviation();
            }
            dev.push_back(std::move(row));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < dev.size() && i + (std::size_t{1} << k) <= n; ++k)
                relax(i, i + (std::size_t{1} << k), dev[k][i]);
    }
    std::vector<std::pair<std::size_t, std::size_t>> rev;
    for (std::size_t j = n; j > 0; j = from[j]) rev.emplace_back(from[j], j);
    return {rev.rbegin(), rev.rend()};
}

} // namespace detail

/// Noise-free DAWA partition: minimizes total absolute deviation plus `penalty` per bucket.
inline std::vector<std::pair<std::size_t, std::size_t>> dawa_exact_partition(std::span<const double> x, double penalty) {
    return detail::dawa_dp(x, penalty, [] { return 0.0; }, false);
}

/// Private partition: every interval deviation is perturbed with Laplace(2 / eps1), and
/// each bucket costs 1 / eps2 for the noise its count will receive.
inline partition dawa_partition(std::span<const double> x, double eps1, double eps2, rng_stream& rng,
                                std::size_t all_intervals_limit = 4096) {
    detail::require(eps1 > 0.0 && eps2 > 0.0, "dawa_partition: budgets must be positive");
    partition p;
    p.buckets = detail::dawa_dp(x, 1.0 / eps2, [&] { return rng.laplace(2.0 / eps1); },
                                x.size() > all_intervals_limit);
    return p;
}

namespace detail {

inline interval_workload to_bucket_workload(const interval_workload& cells, const std::vector<std::size_t>& bucket_of) {
    interval_workload out;
    out.reserve(cells.size());
    for (const auto& set : cells) {
        interval_set mapped;
        for (const auto& [lo, hi] : set) {
            const std::size_t a = bucket_of[lo], b = bucket_of[hi];
            if (!mapped.empty() && mapped.back().second + 1 >= a)
                mapped.back().second = std::max(mapped.back().second, b);
            else
                mapped.emplace_back(a, b);
        }
        out.push_back(std::move(mapped));
    }
    return out;
}

/// DAWA on a 1D vector: returns cell estimates.
inline std::vector<double> dawa_estimate(const data_vector& x, const interval_workload& queries, double epsilon,
                                         run_context& ctx, const dawa_options& opts) {
    const double eps1 = opts.rho * epsilon;
    const double eps2 = epsilon - eps1;
    const auto values = x.as_reals();
    auto p = dawa_partition(values, eps1, eps2, ctx.rng(), opts.all_intervals_limit);
    ctx.spend("partition", eps1);
    const auto sums = bucket_sums(x.counts(), p.buckets);
    std::vector<std::int64_t> bucket_counts(sums.size());
    for (std::size_t b = 0; b < sums.size(); ++b) bucket_counts[b] = static_cast<std::int64_t>(sums[b]);
    const data_vector buckets(domain::one_d(p.size()), std::move(bucket_counts));
    p.counts = greedyh_estimate(buckets, to_bucket_workload(queries, p.bucket_of_cell()), eps2, ctx, opts.branching);
    return expand_uniform(p, x.size());
}

} // namespace detail

inline mechanism_result dawa_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                 const dawa_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(opts.rho > 0.0 && opts.rho < 1.0, "dawa: rho must lie in (0, 1)");
    const double start = ctx.spent();
    if (x.dom().dims() == 1) {
        auto cells = detail::dawa_estimate(x, to_interval_workload(w), epsilon, ctx, opts);
        return detail::finish(w, x.dom(), std::move(cells), ctx.spent() - start);
    }
    const hilbert_order order(x.dom());
    const auto line = hilbert_linearize(x, order);
    const auto est = detail::dawa_estimate(line, to_interval_workload(w, order), epsilon, ctx, opts);
    return detail::finish(w, x.dom(), order.unlinearize<double>(est), ctx.spent() - start);
}

} // namespace dpbench
