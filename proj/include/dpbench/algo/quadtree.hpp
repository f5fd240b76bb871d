#pragma once

// QuadTree: a fixed-height quadtree with uniform per-level budget and least-squares inference.

#include <algorithm>
#include <vector>

#include "dpbench/algo/hierarchical.hpp"
#include "dpbench/algo/result.hpp"

namespace dpbench {

/// Side of a leaf block: the padded power-of-two side divided by 2^min(height, depth).
inline std::size_t quadtree_leaf_side(const domain& d, std::size_t height) {
    const std::size_t h = tree_height(std::max(d.rows(), d.cols()), 2);
    return std::size_t{1} << (h - std::min(h, height));
}

inline mechanism_result quadtree_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                     std::size_t height = 10) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(x.dom().dims() == 2, "quadtree: 2D data required");
    const double start = ctx.spent();
    auto tree = build_aligned_tree(x.dom().rows(), x.dom().cols(), true, 2, height);
    const auto depth = tree.depths();
    const std::size_t levels = *std::max_element(depth.begin(), depth.end()) + 1;
    const std::vector<double> level_eps(levels, epsilon / static_cast<double>(levels));
    detail::measure_levels(tree, x, level_eps, ctx);
    return detail::finish(w, x.dom(), detail::infer_cells(tree, x.dom()), ctx.spent() - start);
}

} // namespace dpbench
