#pragma once

// UGrid (one equi-width grid sized from the scale) and AGrid (a coarse grid refined per
// block from its noisy count, reconciled by least squares).

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpbench/algo/result.hpp"
#include "dpbench/dp/laplace.hpp"
#include "dpbench/dp/tree.hpp"

namespace dpbench {

/// Boundaries of m equal-width parts of [0, n); the last part absorbs the remainder.
inline std::vector<std::size_t> equi_width_bounds(std::size_t n, std::size_t m) {
    detail::require(m >= 1 && m <= n, "equi_width_bounds: need 1 <= m <= n");
    const std::size_t width = n / m;
    std::vector<std::size_t> b(m + 1);
    for (std::size_t i = 0; i < m; ++i) b[i] = i * width;
    b[m] = n;
    return b;
}

/// Cells per axis: max(1, round(sqrt(scale * epsilon / c))).
inline std::size_t ugrid_side(double scale, double epsilon, double c = 10.0) {
    const double m = std::round(std::sqrt(std::max(0.0, scale) * epsilon / c));
    return m < 1.0 ? 1 : static_cast<std::size_t>(m);
}

/// Coarse cells per axis: max(10, ceil(sqrt(scale * epsilon / c) / 4)).
inline std::size_t agrid_coarse_side(double scale, double epsilon, double c = 10.0) {
    const double m = std::ceil(std::sqrt(std::max(0.0, scale) * epsilon / c) / 4.0);
    return m < 10.0 ? 10 : static_cast<std::size_t>(m);
}

/// Fine cells per axis inside a block: max(1, round(sqrt(noisy_count * epsilon / c2))).
inline std::size_t agrid_fine_side(double noisy_count, double epsilon, double c2 = 5.0) {
    if (!(noisy_count > 0.0)) return 1;
    const double m = std::round(std::sqrt(noisy_count * epsilon / c2));
    return m < 1.0 ? 1 : static_cast<std::size_t>(m);
}

struct ugrid_options {
    double c = 10.0;
    double assumed_scale = 0.0; ///< 0 means the true scale
};

struct agrid_options {
    double c = 10.0;
    double c2 = 5.0;
    double rho = 0.5;
    double assumed_scale = 0.0; ///< 0 means the true scale
};

namespace detail {

inline double grid_scale(double assumed, const data_vector& x) {
    if (assumed > 0.0) return assumed;
    return static_cast<double>(x.scale());
}

/// Boxes of an equi-width grid over [r0, r1) x [c0, c1) with up to m parts per axis.
inline std::vector<cell_box> grid_boxes(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1, std::size_t m) {
    const auto rb = equi_width_bounds(r1 - r0, std::min(m, r1 - r0));
    const auto cb = equi_width_bounds(c1 - c0, std::min(m, c1 - c0));
    std::vector<cell_box> out;
    for (std::size_t i = 0; i + 1 < rb.size(); ++i)
        for (std::size_t j = 0; j + 1 < cb.size(); ++j)
            out.push_back({r0 + rb[i], r0 + rb[i + 1], c0 + cb[j], c0 + cb[j + 1]});
    return out;
}

inline double true_box_sum(const data_vector& x, const cell_box& b) {
    double s = 0.0;
    const std::size_t cols = x.dom().cols();
    for (std::size_t r = b.row0; r < b.row1; ++r)
        for (std::size_t c = b.col0; c < b.col1; ++c) s += static_cast<double>(x[r * cols + c]);
    return s;
}

inline void fill_box(std::vector<double>& cells, std::size_t cols, const cell_box& b, double total) {
    const double per = total / static_cast<double>(b.cell_count());
    for (std::size_t r = b.row0; r < b.row1; ++r)
        for (std::size_t c = b.col0; c < b.col1; ++c) cells[r * cols + c] = per;
}

} // namespace detail

inline mechanism_result ugrid_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                  const ugrid_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(x.dom().dims() == 2, "ugrid: 2D data required");
    const double start = ctx.spent();
    const auto& d = x.dom();
    const std::size_t m = ugrid_side(detail::grid_scale(opts.assumed_scale, x), epsilon, opts.c);
    std::vector<double> cells(d.cells(), 0.0);
    for (const auto& box : detail::grid_boxes(0, d.rows(), 0, d.cols(), m))
        detail::fill_box(cells, d.cols(), box, detail::true_box_sum(x, box) + ctx.rng().laplace(1.0 / epsilon));
    ctx.spend("grid counts", epsilon);
    return detail::finish(w, d, std::move(cells), ctx.spent() - start);
}

inline mechanism_result agrid_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                  const agrid_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(x.dom().dims() == 2, "agrid: 2D data required");
    detail::require(opts.rho > 0.0 && opts.rho < 1.0, "agrid: rho must lie in (0, 1)");
    const double start = ctx.spent();
    const auto& d = x.dom();
    const double eps1 = opts.rho * epsilon;
    const double eps2 = epsilon - eps1;
    const std::size_t m1 = agrid_coarse_side(detail::grid_scale(opts.assumed_scale, x), epsilon, opts.c);

    // Two-level tree under an unmeasured root.
    noisy_tree tree;
    tree.add_root({0, d.rows(), 0, d.cols()});
    const auto coarse = detail::grid_boxes(0, d.rows(), 0, d.cols(), m1);
    std::vector<std::size_t> coarse_nodes;
    for (const auto& box : coarse) {
        const std::size_t node = tree.add_child(0, box);
        tree.measure(node, detail::true_box_sum(x, box) + ctx.rng().laplace(1.0 / eps1), laplace_variance(1.0 / eps1));
        coarse_nodes.push_back(node);
    }
    ctx.spend("coarse grid", eps1);
    for (auto node : coarse_nodes) {
        const cell_box box = tree[node].box;
        const std::size_t m2 = agrid_fine_side(tree[node].measurement, eps2, opts.c2);
        for (const auto& fine : detail::grid_boxes(box.row0, box.row1, box.col0, box.col1, m2)) {
            const std::size_t leaf = tree.add_child(node, fine);
            tree.measure(leaf, detail::true_box_sum(x, fine) + ctx.rng().laplace(1.0 / eps2),
                         laplace_variance(1.0 / eps2));
        }
    }
    ctx.spend("fine grids", eps2);
    const auto consistent = tree_least_squares(tree);
    return detail::finish(w, d, expand_leaves(tree, consistent, d.rows(), d.cols()), ctx.spent() - start);
}

} // namespace dpbench
