#pragma once

// StructureFirst: optimal-SSE bucket structure sampled boundary by boundary with the
// exponential mechanism, then noisy bucket counts (optionally a hierarchy per bucket).

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dpbench/algo/hierarchical.hpp"
#include "dpbench/algo/partition.hpp"
#include "dpbench/algo/result.hpp"
#include "dpbench/dp/exponential.hpp"

namespace dpbench {

/// Fraction of epsilon spent on the structure, as a function of (k, F).
using sf_budget_fn = std::function<double(std::size_t k, double f)>;

inline double sf_default_rho(std::size_t, double) { return 0.5; }

inline std::size_t sf_default_buckets(std::size_t n) { return (n + 9) / 10; }

struct sf_options {
    std::size_t k = 0;      ///< 0 means ceil(n / 10)
    double f = 0.0;         ///< bound on a cell count; 0 means the true scale
    sf_budget_fn rho = sf_default_rho;
    bool hierarchy_per_bucket = true;
};

namespace detail {

/// Sum of squared errors around the mean of [lo, hi), exact in 128-bit integers.
class sse_table {
public:
    explicit sse_table(std::span<const std::int64_t> x) : s1_(x.size() + 1, 0), s2_(x.size() + 1, 0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            s1_[i + 1] = s1_[i] + x[i];
            s2_[i + 1] = s2_[i] + static_cast<__int128>(x[i]) * x[i];
        }
    }

    double operator()(std::size_t lo, std::size_t hi) const {
        const auto len = static_cast<__int128>(hi - lo);
        const __int128 s1 = s1_[hi] - s1_[lo];
        const __int128 num = len * (s2_[hi] - s2_[lo]) - s1 * s1;
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(len));
    }

private:
    std::vector<__int128> s1_, s2_;
};

} // namespace detail

/// opt[j][t]: least SSE of splitting the prefix [0, t) into j + 1 buckets.
inline std::vector<std::vector<double>> sf_prefix_costs(const detail::sse_table& sse, std::size_t n, std::size_t k) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> opt(k, std::vector<double>(n + 1, inf));
    for (std::size_t t = 1; t <= n; ++t) opt[0][t] = sse(0, t);
    for (std::size_t j = 1; j < k; ++j)
        for (std::size_t t = j + 1; t <= n; ++t) {
            double best = inf;
            for (std::size_t s = j; s < t; ++s) best = std::min(best, opt[j - 1][s] + sse(s, t));
            opt[j][t] = best;
        }
    return opt;
}

/// Samples k-1 boundaries from the right end, each with the exponential mechanism at
/// epsilon / (k-1) and score sensitivity 2F + 1.
inline std::vector<std::pair<std::size_t, std::size_t>> sf_partition(std::span<const std::int64_t> x, std::size_t k,
                                                                      double f, double epsilon, rng_stream& rng) {
    const std::size_t n = x.size();
    detail::require(k >= 1 && k <= n, "sf: bucket count must lie in [1, n]");
    if (k == 1) return {{0, n}};
    const detail::sse_table sse(x);
    const auto opt = sf_prefix_costs(sse, n, k - 1);
    const double per_step = epsilon / static_cast<double>(k - 1);
    const double sens = 2.0 * f + 1.0;
    std::vector<std::pair<std::size_t, std::size_t>> rev;
    std::size_t end = n;
    for (std::size_t j = k - 1; j >= 1; --j) {
        // Last bucket [t, end); the prefix [0, t) holds j buckets.
        std::vector<double> scores;
        for (std::size_t t = j; t < end; ++t) scores.push_back(-(opt[j - 1][t] + sse(t, end)));
        const std::size_t t = j + exponential_mechanism(scores, per_step, sens, rng);
        rev.emplace_back(t, end);
        end = t;
    }
    rev.emplace_back(0, end);
    return {rev.rbegin(), rev.rend()};
}

inline mechanism_result sf_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                               const sf_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(x.dom().dims() == 1, "sf: 1D data required");
    const std::size_t n = x.size();
    const std::size_t k = opts.k == 0 ? sf_default_buckets(n) : opts.k;
    detail::require(k <= n, "sf: more buckets than cells");
    const double f = opts.f > 0.0 ? opts.f : static_cast<double>(x.scale());
    const double start = ctx.spent();

    double eps1 = 0.0;
    if (k > 1) {
        const double rho = opts.rho(k, f);
        detail::require(rho > 0.0 && rho < 1.0, "sf: budget fraction must lie in (0, 1)");
        eps1 = rho * epsilon;
    }
    const double eps2 = epsilon - eps1;
    partition p;
    p.buckets = sf_partition(x.counts(), k, f, eps1, ctx.rng());
    if (k > 1) ctx.spend("structure", eps1);

    std::vector<double> cells;
    if (!opts.hierarchy_per_bucket) {
        p.counts = bucket_sums(x.counts(), p.buckets);
        for (auto& c : p.counts) c += ctx.rng().laplace(1.0 / eps2);
        cells = expand_uniform(p, n);
    } else {
        // Buckets are disjoint, so each gets a full-budget binary hierarchy.
        cells.assign(n, 0.0);
        for (std::size_t b = 0; b < p.size(); ++b) {
            const auto [lo, hi] = p.buckets[b];
            data_vector sub(domain::one_d(hi - lo),
                            std::vector<std::int64_t>(x.counts().begin() + static_cast<std::ptrdiff_t>(lo),
                                                      x.counts().begin() + static_cast<std::ptrdiff_t>(hi)));
            auto tree = build_aligned_tree(hi - lo, 1, false, 2);
            const auto depth = tree.depths();
            const std::size_t levels = *std::max_element(depth.begin(), depth.end()) + 1;
            const std::vector<double> level_eps(levels, eps2 / static_cast<double>(levels));
            run_context sub_ctx(ctx.rng().substream(b));
            detail::measure_levels(tree, sub, level_eps, sub_ctx);
            const auto est = detail::infer_cells(tree, sub.dom());
            std::copy(est.begin(), est.end(), cells.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    ctx.spend("bucket counts", eps2);
    return detail::finish(w, x.dom(), std::move(cells), ctx.spent() - start);
}

} // namespace dpbench
