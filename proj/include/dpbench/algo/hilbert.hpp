#pragma once

// Hilbert-curve linearization of 2D histograms, so 1D mechanisms can run on grids.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "dpbench/core.hpp"
#include "dpbench/dp/haar.hpp"

namespace dpbench {

namespace detail {

inline void hilbert_rotate(std::size_t n, std::size_t& x, std::size_t& y, std::size_t rx, std::size_t ry) {
    if (ry == 0) {
        if (rx == 1) {
            x = n - 1 - x;
            y = n - 1 - y;
        }
        std::swap(x, y);
    }
}

} // namespace detail

/// Position of (x, y) on the Hilbert curve filling a side x side grid (side a power of two).
inline std::size_t hilbert_xy_to_d(std::size_t side, std::size_t x, std::size_t y) {
    std::size_t d = 0;
    for (std::size_t s = side / 2; s > 0; s /= 2) {
        const std::size_t rx = (x & s) > 0 ? 1 : 0;
        const std::size_t ry = (y & s) > 0 ? 1 : 0;
        d += s * s * ((3 * rx) ^ ry);
        detail::hilbert_rotate(side, x, y, rx, ry);
    }
    return d;
}

inline std::pair<std::size_t, std::size_t> hilbert_d_to_xy(std::size_t side, std::size_t d) {
    std::size_t x = 0, y = 0, t = d;
    for (std::size_t s = 1; s < side; s *= 2) {
        const std::size_t rx = 1 & (t / 2);
        const std::size_t ry = 1 & (t ^ rx);
        detail::hilbert_rotate(s, x, y, rx, ry);
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
    return {x, y};
}

/// Bijection between the cells of a (zero-padded) square power-of-two grid and 1D positions.
class hilbert_order {
public:
    explicit hilbert_order(const domain& d) : rows_(d.rows()), cols_(d.cols()) {
        detail::require(d.dims() == 2, "hilbert_order: 2D domain required");
        side_ = next_pow2(std::max(rows_, cols_));
        const std::size_t total = side_ * side_;
        cell_of_pos_.resize(total);
        pos_of_cell_.resize(total);
        for (std::size_t pos = 0; pos < total; ++pos) {
            const auto [x, y] = hilbert_d_to_xy(side_, pos);
            const std::size_t cell = y * side_ + x; // padded row-major, row = y
            cell_of_pos_[pos] = cell;
            pos_of_cell_[cell] = pos;
        }
    }

    std::size_t side() const noexcept { return side_; }
    std::size_t length() const noexcept { return side_ * side_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    /// Position of real cell (r, c).
    std::size_t position(std::size_t r, std::size_t c) const { return pos_of_cell_[r * side_ + c]; }
    /// (row, col) in the padded grid for a 1D position.
    std::pair<std::size_t, std::size_t> cell(std::size_t pos) const {
        const std::size_t padded = cell_of_pos_[pos];
        return {padded / side_, padded % side_};
    }

    /// Reorders real cells into Hilbert positions; padded positions hold zero.
    template <typename T>
    std::vector<T> linearize(std::span<const T> cells) const {
        detail::require(cells.size() == rows_ * cols_, "hilbert_order: cell count mismatch");
        std::vector<T> out(length(), T{});
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out[position(r, c)] = cells[r * cols_ + c];
        return out;
    }

    /// Inverse of linearize; values on padded positions are dropped.
    template <typename T>
    std::vector<T> unlinearize(std::span<const T> positions) const {
        detail::require(positions.size() == length(), "hilbert_order: position count mismatch");
        std::vector<T> out(rows_ * cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out[r * cols_ + c] = positions[position(r, c)];
        return out;
    }

    /// Inclusive position intervals whose union is exactly the cells of `q`, sorted and merged.
    std::vector<std::pair<std::size_t, std::size_t>> intervals(const range_query& q) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        collect(q, 0, 0, side_, out);
        std::sort(out.begin(), out.end());
        std::vector<std::pair<std::size_t, std::size_t>> merged;
        for (const auto& iv : out) {
            if (!merged.empty() && merged.back().second + 1 == iv.first)
                merged.back().second = iv.second;
            else
                merged.push_back(iv);
        }
        return merged;
    }

private:
    // Aligned square blocks are contiguous on the curve, so recurse on quadrants.
    void collect(const range_query& q, std::size_t r0, std::size_t c0, std::size_t size,
                 std::vector<std::pair<std::size_t, std::size_t>>& out) const {
        const std::size_t r1 = r0 + size - 1, c1 = c0 + size - 1;
        if (r0 > q.hi[0] || r1 < q.lo[0] || c0 > q.hi[1] || c1 < q.lo[1]) return;
        if (r0 >= q.lo[0] && r1 <= q.hi[0] && c0 >= q.lo[1] && c1 <= q.hi[1]) {
            const std::size_t start = pos_of_cell_[r0 * side_ + c0] / (size * size) * (size * size);
            out.emplace_back(start, start + size * size - 1);
            return;
        }
        const std::size_t h = size / 2;
        collect(q, r0, c0, h, out);
        collect(q, r0, c0 + h, h, out);
        collect(q, r0 + h, c0, h, out);
        collect(q, r0 + h, c0 + h, h, out);
    }

    std::size_t rows_, cols_, side_;
    std::vector<std::size_t> cell_of_pos_;
    std::vector<std::size_t> pos_of_cell_;
};

/// 2D histogram -> 1D histogram in Hilbert order (zero padded to a square power of two).
inline data_vector hilbert_linearize(const data_vector& x, const hilbert_order& order) {
    auto counts = order.linearize<std::int64_t>(x.counts());
    return {domain::one_d(order.length()), std::move(counts)};
}

inline data_vector hilbert_linearize(const data_vector& x) { return hilbert_linearize(x, hilbert_order(x.dom())); }

} // namespace dpbench
