#pragma once

// Noisy hierarchical measurements and their least-squares consistency step.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "dpbench/core.hpp"
#include "dpbench/errors.hpp"

namespace dpbench {

/// Half-open box of cells [row0, row1) x [col0, col1). 1D boxes have col range [0, 1).
struct cell_box {
    std::size_t row0 = 0, row1 = 0, col0 = 0, col1 = 1;

    std::size_t cell_count() const noexcept { return (row1 - row0) * (col1 - col0); }
    bool empty() const noexcept { return row1 <= row0 || col1 <= col0; }
};

/// Marks a node with no measurement.
inline constexpr double unmeasured = std::numeric_limits<double>::infinity();

struct tree_node {
    std::size_t parent = 0;
    std::vector<std::size_t> children;
    cell_box box;
    double measurement = 0.0;
    double variance = unmeasured;
};

/// A tree of (possibly noisy) subtree-sum measurements. Node 0 is the root and every
/// child is stored after its parent.
class noisy_tree {
public:
    std::size_t add_root(cell_box box) {
        detail::require(nodes_.empty(), "noisy_tree: root already present");
        nodes_.push_back({0, {}, box});
        return 0;
    }

    std::size_t add_child(std::size_t parent, cell_box box) {
        detail::require(parent < nodes_.size(), "noisy_tree: unknown parent");
        nodes_.push_back({parent, {}, box});
        nodes_[parent].children.push_back(nodes_.size() - 1);
        return nodes_.size() - 1;
    }

    void measure(std::size_t node, double value, double variance) {
        detail::require(variance >= 0.0, "noisy_tree: variance must be non-negative");
        nodes_.at(node).measurement = value;
        nodes_.at(node).variance = variance;
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    const tree_node& operator[](std::size_t i) const { return nodes_[i]; }
    tree_node& operator[](std::size_t i) { return nodes_[i]; }
    std::span<const tree_node> nodes() const noexcept { return nodes_; }

    /// Depth of every node (root = 0).
    std::vector<std::size_t> depths() const {
        std::vector<std::size_t> d(nodes_.size(), 0);
        for (std::size_t i = 1; i < nodes_.size(); ++i) d[i] = d[nodes_[i].parent] + 1;
        return d;
    }

    /// Throws unless children tile their parent and node order is topological.
    void validate() const {
        detail::require(!nodes_.empty(), "noisy_tree: empty tree");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const auto& n = nodes_[i];
            detail::require(!n.box.empty(), "noisy_tree: empty node box");
            if (i > 0) detail::require(n.parent < i, "noisy_tree: parent stored after child");
            if (n.children.empty()) continue;
            std::size_t covered = 0;
            for (auto c : n.children) {
                detail::require(c > i && c < nodes_.size(), "noisy_tree: bad child index");
                const auto& b = nodes_[c].box;
                detail::require(b.row0 >= n.box.row0 && b.row1 <= n.box.row1 && b.col0 >= n.box.col0 &&
                                    b.col1 <= n.box.col1,
                                "noisy_tree: child box leaves its parent");
                covered += b.cell_count();
            }
            detail::require(covered == n.box.cell_count(), "noisy_tree: children do not partition their parent");
        }
    }

private:
    std::vector<tree_node> nodes_;
};

/// Generalized least-squares estimates of every node's true subtree sum.
///
/// Exact two-pass solution for independent measurements with arbitrary variances:
/// the upward pass fuses each node's measurement with the sum of its children's
/// estimates by inverse variance; the downward pass splits each parent's residual
/// among its children in proportion to their variances. Unmeasured nodes carry
/// infinite variance; zero-variance nodes are treated as exact.
inline std::vector<double> tree_least_squares(const noisy_tree& t) {
    t.validate();
    const std::size_t m = t.size();
    std::vector<double> est(m), var(m);
    for (std::size_t i = m; i-- > 0;) {
        const auto& n = t[i];
        if (n.children.empty()) {
            est[i] = std::isinf(n.variance) ? 0.0 : n.measurement;
            var[i] = n.variance;
            continue;
        }
        double s = 0.0, v = 0.0;
        for (auto c : n.children) {
            s += est[c];
            v += var[c];
        }
        if (std::isinf(n.variance)) {
            est[i] = s;
            var[i] = v;
        } else if (std::isinf(v)) {
            est[i] = n.measurement;
            var[i] = n.variance;
        } else if (n.variance == 0.0) {
            est[i] = n.measurement;
            var[i] = 0.0;
        } else {
            const double w = v / (n.variance + v);
            est[i] = w * n.measurement + (1.0 - w) * s;
            var[i] = n.variance * v / (n.variance + v);
        }
    }

    std::vector<double> out(m);
    out[0] = est[0];
    for (std::size_t i = 0; i < m; ++i) {
        const auto& n = t[i];
        if (n.children.empty()) continue;
        double s = 0.0, v = 0.0, inf_cells = 0.0, cells = 0.0;
        for (auto c : n.children) {
            s += est[c];
            cells += static_cast<double>(t[c].box.cell_count());
            if (std::isinf(var[c]))
                inf_cells += static_cast<double>(t[c].box.cell_count());
            else
                v += var[c];
        }
        const double residual = out[i] - s;
        for (auto c : n.children) {
            const double share_cells = static_cast<double>(t[c].box.cell_count());
            double share;
            if (inf_cells > 0.0)
                share = std::isinf(var[c]) ? share_cells / inf_cells : 0.0;
            else if (v > 0.0)
                share = var[c] / v;
            else
                share = share_cells / cells;
            out[c] = est[c] + share * residual;
        }
    }
    return out;
}

/// Spreads each leaf's estimate uniformly over its cells (row-major, `cols` wide).
inline std::vector<double> expand_leaves(const noisy_tree& t, std::span<const double> node_values, std::size_t rows,
                                         std::size_t cols) {
    std::vector<double> cells(rows * cols, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& n = t[i];
        if (!n.children.empty()) continue;
        const double per = node_values[i] / static_cast<double>(n.box.cell_count());
        for (std::size_t r = n.box.row0; r < std::min(n.box.row1, rows); ++r)
            for (std::size_t c = n.box.col0; c < std::min(n.box.col1, cols); ++c) cells[r * cols + c] = per;
    }
    return cells;
}

/// Exact sum of `cells` inside a box, clipped to the real rows x cols grid.
inline double box_sum(std::span<const double> cells, std::size_t rows, std::size_t cols, const cell_box& b) {
    double s = 0.0;
    for (std::size_t r = b.row0; r < std::min(b.row1, rows); ++r)
        for (std::size_t c = b.col0; c < std::min(b.col1, cols); ++c) s += cells[r * cols + c];
    return s;
}

} // namespace dpbench
