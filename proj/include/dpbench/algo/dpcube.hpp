#pragma once

// DPCube: a kd-tree over noisy cell counts picks the boxes, fresh noisy box counts are
// averaged with the first-stage box sums, and each box is spread uniformly.

#include <limits>
#include <vector>

#include "dpbench/algo/result.hpp"
#include "dpbench/dp/laplace.hpp"
#include "dpbench/dp/tree.hpp"

namespace dpbench {

struct dpcube_options {
    double rho = 0.5;
    /// A box stops splitting once its noisy squared deviation is within n_p times what
    /// pure first-stage noise would produce.
    double n_p = 10.0;
};

namespace detail {

inline double box_sse(std::span<const double> v, std::size_t cols, const cell_box& b) {
    double mean = 0.0;
    for (std::size_t r = b.row0; r < b.row1; ++r)
        for (std::size_t c = b.col0; c < b.col1; ++c) mean += v[r * cols + c];
    mean /= static_cast<double>(b.cell_count());
    double sse = 0.0;
    for (std::size_t r = b.row0; r < b.row1; ++r)
        for (std::size_t c = b.col0; c < b.col1; ++c) sse += (v[r * cols + c] - mean) * (v[r * cols + c] - mean);
    return sse;
}

} // namespace detail

/// Split of `box` along `axis` (0 = rows, 1 = cols) minimizing the summed squared
/// deviation of the two halves; returns the first index of the upper half, lowest on ties.
inline std::size_t dpcube_best_split(std::span<const double> v, std::size_t cols, const cell_box& box, int axis) {
    const std::size_t lo = axis == 0 ? box.row0 : box.col0;
    const std::size_t hi = axis == 0 ? box.row1 : box.col1;
    detail::require(hi - lo >= 2, "dpcube_best_split: axis has a single slice");
    const std::size_t width = axis == 0 ? box.col1 - box.col0 : box.row1 - box.row0;
    std::vector<double> s1(hi - lo + 1, 0.0), s2(hi - lo + 1, 0.0);
    for (std::size_t k = lo; k < hi; ++k) {
        double a = 0.0, b = 0.0;
        for (std::size_t o = 0; o < width; ++o) {
            const double val = axis == 0 ? v[k * cols + box.col0 + o] : v[(box.row0 + o) * cols + k];
            a += val;
            b += val * val;
        }
        s1[k - lo + 1] = s1[k - lo] + a;
        s2[k - lo + 1] = s2[k - lo] + b;
    }
    auto sse = [&](std::size_t i, std::size_t j) {
        const double n = static_cast<double>((j - i) * width);
        const double a = s1[j] - s1[i];
        return std::max(0.0, (s2[j] - s2[i]) - a * a / n);
    };
    const std::size_t len = hi - lo;
    std::size_t best = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m < len; ++m) {
        const double cost = sse(0, m) + sse(m, len);
        if (cost < best_cost) {
            best_cost = cost;
            best = m;
        }
    }
    return lo + best;
}

/// Leaf boxes of the kd-tree over noisy counts `v` with per-cell noise variance `noise_var`.
/// Axes alternate starting with rows; an axis with one slice hands over to the other.
inline std::vector<cell_box> dpcube_boxes(std::span<const double> v, const domain& d, double noise_var, double n_p) {
    std::vector<cell_box> leaves;
    std::vector<std::pair<cell_box, std::size_t>> stack{{{0, d.rows(), 0, d.cols()}, 0}};
    while (!stack.empty()) {
        const auto [box, depth] = stack.back();
        stack.pop_back();
        const std::size_t count = box.cell_count();
        if (count == 1 || detail::box_sse(v, d.cols(), box) <= n_p * static_cast<double>(count - 1) * noise_var) {
            leaves.push_back(box);
            continue;
        }
        int axis = static_cast<int>(depth % 2);
        if ((axis == 0 ? box.row1 - box.row0 : box.col1 - box.col0) < 2) axis = 1 - axis;
        const std::size_t cut = dpcube_best_split(v, d.cols(), box, axis);
        cell_box a = box, b = box;
        if (axis == 0) {
            a.row1 = cut;
            b.row0 = cut;
        } else {
            a.col1 = cut;
            b.col0 = cut;
        }
        stack.push_back({b, depth + 1});
        stack.push_back({a, depth + 1});
    }
    return leaves;
}

inline mechanism_result dpcube_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                   const dpcube_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(opts.rho > 0.0 && opts.rho < 1.0, "dpcube: rho must lie in (0, 1)");
    detail::require(opts.n_p > 0.0, "dpcube: n_p must be positive");
    const double start = ctx.spent();
    const auto& d = x.dom();
    const std::size_t cols = d.cols();
    const double eps1 = opts.rho * epsilon;
    const double eps2 = epsilon - eps1;
    const double var1 = laplace_variance(1.0 / eps1);
    const double var2 = laplace_variance(1.0 / eps2);

    auto noisy = x.as_reals();
    for (auto& v : noisy) v += ctx.rng().laplace(1.0 / eps1);
    ctx.spend("noisy cells", eps1);
    const auto boxes = dpcube_boxes(noisy, d, var1, opts.n_p);

    std::vector<double> cells(d.cells(), 0.0);
    for (const auto& box : boxes) {
        double stage1 = 0.0, truth = 0.0;
        for (std::size_t r = box.row0; r < box.row1; ++r)
            for (std::size_t c = box.col0; c < box.col1; ++c) {
                stage1 += noisy[r * cols + c];
                truth += static_cast<double>(x[r * cols + c]);
            }
        const double stage2 = truth + ctx.rng().laplace(1.0 / eps2);
        const double v1 = var1 * static_cast<double>(box.cell_count());
        const double total = (stage1 / v1 + stage2 / var2) / (1.0 / v1 + 1.0 / var2);
        const double per = total / static_cast<double>(box.cell_count());
        for (std::size_t r = box.row0; r < box.row1; ++r)
            for (std::size_t c = box.col0; c < box.col1; ++c) cells[r * cols + c] = per;
    }
    ctx.spend("box counts", eps2);
    return detail::finish(w, d, std::move(cells), ctx.spent() - start);
}

} // namespace dpbench
