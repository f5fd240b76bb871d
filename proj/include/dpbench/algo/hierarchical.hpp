#pragma once

// Hierarchical strategies: H (fixed branching, uniform budget), H_b (branching chosen
// from the domain size) and Greedy-H (per-level budget tuned to the workload).

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "dpbench/algo/hilbert.hpp"
#include "dpbench/algo/result.hpp"
#include "dpbench/dp/laplace.hpp"
#include "dpbench/dp/tree.hpp"

namespace dpbench {

/// Inclusive 1D position intervals; a query is the union of its intervals.
using interval_set = std::vector<std::pair<std::size_t, std::size_t>>;
using interval_workload = std::vector<interval_set>;

inline interval_workload to_interval_workload(const workload& w) {
    detail::require(w.dom().dims() == 1, "to_interval_workload: 1D workload required");
    interval_workload out;
    out.reserve(w.size());
    for (const auto& q : w.queries()) out.push_back({{q.lo[0], q.hi[0]}});
    return out;
}

inline interval_workload to_interval_workload(const workload& w, const hilbert_order& order) {
    interval_workload out;
    out.reserve(w.size());
    for (const auto& q : w.queries()) out.push_back(order.intervals(q));
    return out;
}

/// Smallest h with b^h >= n.
inline std::size_t tree_height(std::size_t n, std::size_t b) {
    std::size_t h = 0;
    for (std::size_t p = 1; p < n; p *= b) ++h;
    return h;
}

inline std::size_t int_pow(std::size_t b, std::size_t e) {
    std::size_t p = 1;
    while (e-- > 0) p *= b;
    return p;
}

/// Aligned b-ary hierarchy over a rows x cols grid (cols = 1 and one split axis for 1D).
/// Node boxes come from a complete tree over a padded b^h square and are clipped to the
/// grid; nodes lying wholly in padding are omitted. Depth is capped at `max_depth`.
inline noisy_tree build_aligned_tree(std::size_t rows, std::size_t cols, bool two_d, std::size_t b,
                                     std::size_t max_depth = std::numeric_limits<std::size_t>::max()) {
    detail::require(b >= 2, "build_aligned_tree: branching must be at least 2");
    const std::size_t h = tree_height(std::max(rows, two_d ? cols : std::size_t{1}), b);
    const std::size_t depth = std::min(h, max_depth);
    const std::size_t padded = int_pow(b, h);
    noisy_tree t;
    t.add_root({0, rows, 0, cols});
    std::vector<std::size_t> frontier{0}, next;
    std::size_t size = padded;
    for (std::size_t level = 0; level < depth; ++level) {
        const std::size_t child = size / b;
        next.clear();
        for (auto node : frontier) {
            const cell_box box = t[node].box;
            for (std::size_t i = 0; i < b; ++i) {
                const std::size_t r0 = box.row0 + i * child;
                if (r0 >= rows) break;
                const std::size_t r1 = std::min(r0 + child, rows);
                if (!two_d) {
                    next.push_back(t.add_child(node, {r0, r1, 0, cols}));
                    continue;
                }
                for (std::size_t j = 0; j < b; ++j) {
                    const std::size_t c0 = box.col0 + j * child;
                    if (c0 >= cols) break;
                    next.push_back(t.add_child(node, {r0, r1, c0, std::min(c0 + child, cols)}));
                }
            }
        }
        frontier.swap(next);
        size = child;
    }
    return t;
}

namespace detail {

inline double sat_box_sum(const std::vector<double>& table, std::size_t cols, const cell_box& b) {
    const std::size_t w = cols + 1;
    return table[b.row1 * w + b.col1] - table[b.row0 * w + b.col1] - table[b.row1 * w + b.col0] +
           table[b.row0 * w + b.col0];
}

/// Measures every node at depth k with Laplace(1 / level_eps[k]); zero budget leaves it unmeasured.
inline void measure_levels(noisy_tree& t, const data_vector& x, std::span<const double> level_eps, run_context& ctx) {
    const auto table = summed_area<std::int64_t>(x.dom(), x.counts());
    const auto depth = t.depths();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = level_eps[depth[i]];
        if (e <= 0.0) continue;
        const double truth = sat_box_sum(table, x.dom().cols(), t[i].box);
        t.measure(i, truth + ctx.rng().laplace(1.0 / e), laplace_variance(1.0 / e));
    }
    for (std::size_t k = 0; k < level_eps.size(); ++k)
        if (level_eps[k] > 0.0) ctx.spend("tree level " + std::to_string(k), level_eps[k]);
}

inline std::vector<double> infer_cells(const noisy_tree& t, const domain& d) {
    const auto consistent = tree_least_squares(t);
    return expand_leaves(t, consistent, d.rows(), d.cols());
}

} // namespace detail

/// H: b-ary tree, every level measured with epsilon / levels, least-squares inference.
/// 2D domains use a product hierarchy splitting both axes b ways.
inline mechanism_result h_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                              std::size_t b = 2) {
    detail::check_run_inputs(x, w, epsilon);
    const double start = ctx.spent();
    const bool two_d = x.dom().dims() == 2;
    auto tree = build_aligned_tree(x.dom().rows(), x.dom().cols(), two_d, b);
    const auto depth = tree.depths();
    const std::size_t levels = *std::max_element(depth.begin(), depth.end()) + 1;
    const std::vector<double> level_eps(levels, epsilon / static_cast<double>(levels));
    detail::measure_levels(tree, x, level_eps, ctx);
    return detail::finish(w, x.dom(), detail::infer_cells(tree, x.dom()), ctx.spent() - start);
}

namespace detail {

/// Per-level (sum over nodes of #ranges containing the node, sum over nodes of
/// #ranges containing it times its child count) along one axis.
struct axis_level_sums {
    std::vector<double> contained;
    std::vector<double> contained_times_children;
};

inline axis_level_sums axis_sums(std::size_t n, std::size_t b, std::size_t h) {
    axis_level_sums out;
    std::size_t size = int_pow(b, h);
    for (std::size_t level = 0; level <= h; ++level, size /= b) {
        double c = 0.0, cc = 0.0;
        for (std::size_t a = 0; a < n; a += size) {
            const std::size_t e = std::min(a + size, n);
            const double ranges = static_cast<double>(a + 1) * static_cast<double>(n - e + 1);
            c += ranges;
            if (level < h) {
                const std::size_t child = size / b;
                cc += ranges * static_cast<double>((e - a + child - 1) / child);
            }
        }
        out.contained.push_back(c);
        out.contained_times_children.push_back(cc);
    }
    return out;
}

} // namespace detail

/// Average variance (per 1/epsilon^2) of answering a uniformly random range query by
/// summing the nodes of its canonical decomposition in a uniform-budget b-ary tree.
/// A node is used by range R exactly when it lies inside R and its parent does not.
inline double hb_average_range_variance(const domain& d, std::size_t b) {
    detail::require(b >= 2, "hb_average_range_variance: branching must be at least 2");
    std::size_t longest = 0;
    for (auto n : d.axis_sizes()) longest = std::max(longest, n);
    const std::size_t h = tree_height(longest, b);
    std::vector<detail::axis_level_sums> axes;
    double ranges = 1.0;
    for (auto n : d.axis_sizes()) {
        axes.push_back(detail::axis_sums(n, b, h));
        ranges *= static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    }
    double used = 0.0;
    for (std::size_t level = 0; level <= h; ++level) {
        double contained = 1.0, parent_terms = 1.0;
        for (const auto& a : axes) {
            contained *= a.contained[level];
            if (level > 0) parent_terms *= a.contained_times_children[level - 1];
        }
        used += contained - (level > 0 ? parent_terms : 0.0);
    }
    const double levels = static_cast<double>(h + 1);
    return used / ranges * laplace_variance(levels);
}

/// Branching factor in [2, max axis size] minimizing hb_average_range_variance; ties go to the smaller b.
inline std::size_t hb_choose_branching(const domain& d) {
    std::size_t longest = 0;
    for (auto n : d.axis_sizes()) longest = std::max(longest, n);
    std::size_t best_b = 2;
    double best = hb_average_range_variance(d, 2);
    for (std::size_t b = 3; b <= longest; ++b) {
        const double v = hb_average_range_variance(d, b);
        if (v < best * (1.0 - 1e-12)) {
            best = v;
            best_b = b;
        }
    }
    return best_b;
}

inline std::size_t hb_choose_branching(std::size_t n, const workload&) { return hb_choose_branching(domain::one_d(n)); }

inline mechanism_result hb_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx) {
    return h_run(x, w, epsilon, ctx, hb_choose_branching(x.dom()));
}

// ---- Greedy-H ------------------------------------------------------------------

/// Number of level-l nodes of the clipped aligned tree over n cells that appear in the
/// canonical decomposition of interval [lo, hi], accumulated into `counts`.
inline void add_canonical_counts(std::size_t n, std::size_t b, std::size_t lo, std::size_t hi,
                                 std::vector<double>& counts) {
    const std::size_t h = tree_height(n, b);
    counts.resize(h + 1, 0.0);
    // Nodes at a level fully inside [lo, hi]: aligned starts k*s >= lo, clipped end <= hi + 1.
    auto inside = [&](std::size_t s) -> std::pair<std::size_t, std::size_t> {
        const std::size_t first = (lo + s - 1) / s;
        const std::size_t last_plus = hi + 1 == n ? (n + s - 1) / s : (hi + 1) / s;
        return {first, std::max(first, last_plus)};
    };
    std::size_t size = int_pow(b, h);
    std::pair<std::size_t, std::size_t> parents{0, 0};
    for (std::size_t level = 0; level <= h; ++level, size /= b) {
        const auto cur = inside(size);
        std::size_t covered = 0;
        if (level > 0 && parents.second > parents.first) {
            // Children of the inside parents: level nodes spanning [first*S, min(last*S, n)).
            const std::size_t ps = size * b;
            const std::size_t c0 = parents.first * ps / size;
            const std::size_t c1 = (std::min(parents.second * ps, n) + size - 1) / size;
            covered = c1 - c0;
        }
        counts[level] += static_cast<double>(cur.second - cur.first - covered);
        parents = cur;
    }
}

/// Workload-weighted node usage per level.
inline std::vector<double> greedyh_level_usage(std::size_t n, const interval_workload& queries, std::size_t b) {
    std::vector<double> counts(tree_height(n, b) + 1, 0.0);
    for (const auto& q : queries)
        for (const auto& [lo, hi] : q) add_canonical_counts(n, b, lo, hi, counts);
    return counts;
}

/// Per-level budget fractions (summing to one). Starting from equal weight on every used
/// level, each level's weight is repeatedly rescaled by the power of sqrt(2) in [-8, 8]
/// that most lowers sum_l usage_l / fraction_l^2, until a full pass changes nothing.
inline std::vector<double> greedyh_weights(std::size_t n, const interval_workload& queries, std::size_t b = 2) {
    const auto usage = greedyh_level_usage(n, queries, b);
    std::vector<double> u(usage.size(), 0.0);
    for (std::size_t l = 0; l < usage.size(); ++l) u[l] = usage[l] > 0.0 ? 1.0 : 0.0;
    auto objective = [&](const std::vector<double>& weights) {
        double total = 0.0, acc = 0.0;
        for (double v : weights) total += v;
        for (std::size_t l = 0; l < weights.size(); ++l)
            if (usage[l] > 0.0) acc += usage[l] / (weights[l] * weights[l]);
        return acc * total * total;
    };
    const double step = std::sqrt(2.0);
    double best = objective(u);
    for (int pass = 0; pass < 64; ++pass) {
        bool changed = false;
        for (std::size_t l = 0; l < u.size(); ++l) {
            if (usage[l] <= 0.0) continue;
            const double base = u[l];
            double best_w = base;
            for (int k = -8; k <= 8; ++k) {
                if (k == 0) continue;
                u[l] = base * std::pow(step, k);
                const double v = objective(u);
                if (v < best * (1.0 - 1e-12)) {
                    best = v;
                    best_w = u[l];
                }
            }
            u[l] = best_w;
            changed = changed || best_w != base;
        }
        if (!changed) break;
    }
    double total = 0.0;
    for (double v : u) total += v;
    for (auto& v : u) v /= total;
    return u;
}

/// Greedy-H on a 1D vector of (true) counts, returning cell estimates.
inline std::vector<double> greedyh_estimate(const data_vector& x, const interval_workload& queries, double epsilon,
                                            run_context& ctx, std::size_t b = 2) {
    detail::require(x.dom().dims() == 1, "greedyh_estimate: 1D data required");
    const std::size_t n = x.size();
    auto weights = greedyh_weights(n, queries, b);
    auto tree = build_aligned_tree(n, 1, false, b);
    std::vector<double> level_eps(weights.size());
    // The last level takes the remainder so the stages add up to epsilon exactly.
    double assigned = 0.0;
    std::size_t last = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        if (weights[l] > 0.0) last = l;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        level_eps[l] = l == last ? epsilon - assigned : epsilon * weights[l];
        assigned += level_eps[l];
    }
    detail::measure_levels(tree, x, level_eps, ctx);
    return detail::infer_cells(tree, x.dom());
}

/// Greedy-H; 2D inputs are linearized along a Hilbert curve.
inline mechanism_result greedyh_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                    std::size_t b = 2) {
    detail::check_run_inputs(x, w, epsilon);
    const double start = ctx.spent();
    if (x.dom().dims() == 1) {
        auto cells = greedyh_estimate(x, to_interval_workload(w), epsilon, ctx, b);
        return detail::finish(w, x.dom(), std::move(cells), ctx.spent() - start);
    }
    const hilbert_order order(x.dom());
    const auto line = hilbert_linearize(x, order);
    const auto est = greedyh_estimate(line, to_interval_workload(w, order), epsilon, ctx, b);
    return detail::finish(w, x.dom(), order.unlinearize<double>(est), ctx.spent() - start);
}

} // namespace dpbench
