#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "dpbench/algorithms.hpp"
#include "dpbench/harness/metrics.hpp"

using namespace dpbench;

namespace {

using mechanism = std::function<mechanism_result(const data_vector&, const workload&, double, run_context&)>;

data_vector grid(std::size_t rows, std::size_t cols, const std::function<std::int64_t(std::size_t, std::size_t)>& f) {
    std::vector<std::int64_t> c(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < cols; ++k) c[r * cols + k] = f(r, k);
    return {domain::two_d(rows, cols), c};
}

double mean_scaled_error(const mechanism& m, const data_vector& x, const workload& w, double eps, int trials) {
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        run_context ctx(rng_stream(3, static_cast<std::uint64_t>(t)));
        total += scaled_error(m(x, w, eps, ctx).answers, w, x);
    }
    return total / trials;
}

const mechanism quadtree = [](const data_vector& x, const workload& w, double e, run_context& c) {
    return quadtree_run(x, w, e, c);
};
const mechanism ugrid = [](const data_vector& x, const workload& w, double e, run_context& c) { return ugrid_run(x, w, e, c); };
const mechanism agrid = [](const data_vector& x, const workload& w, double e, run_context& c) { return agrid_run(x, w, e, c); };
const mechanism dpcube = [](const data_vector& x, const workload& w, double e, run_context& c) {
    return dpcube_run(x, w, e, c);
};
const mechanism dawa = [](const data_vector& x, const workload& w, double e, run_context& c) { return dawa_run(x, w, e, c); };
const mechanism greedy = [](const data_vector& x, const workload& w, double e, run_context& c) {
    return greedyh_run(x, w, e, c);
};

/// Exhaustive split oracle: every cut on the given axis, lowest cost first.
std::size_t oracle_split(std::span<const double> v, std::size_t rows, std::size_t cols, int axis) {
    const std::size_t len = axis == 0 ? rows : cols;
    std::size_t best = 0;
    double best_cost = INFINITY;
    for (std::size_t cut = 1; cut < len; ++cut) {
        double cost = 0.0;
        for (int side = 0; side < 2; ++side) {
            std::vector<double> vals;
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) {
                    const std::size_t k = axis == 0 ? r : c;
                    if ((k < cut) == (side == 0)) vals.push_back(v[r * cols + c]);
                }
            const double m = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
            for (double x : vals) cost += (x - m) * (x - m);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = cut;
        }
    }
    return best;
}

} // namespace

TEST(hilbert, small_grid_preserves_scale) {
    const auto x = grid(2, 2, [](std::size_t r, std::size_t c) { return std::int64_t(r * 2 + c + 1); });
    const auto line = hilbert_linearize(x);
    EXPECT_EQ(line.size(), 4u);
    EXPECT_EQ(line.scale(), x.scale());
}

TEST(hilbert, round_trip_is_identity) {
    const auto x = grid(8, 8, [](std::size_t r, std::size_t c) { return std::int64_t(r * 8 + c); });
    const hilbert_order order(x.dom());
    const auto cells = x.as_reals();
    const auto line = order.linearize<double>(cells);
    EXPECT_EQ(order.unlinearize<double>(line), cells);
    std::set<std::size_t> seen;
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) seen.insert(order.position(r, c));
    EXPECT_EQ(seen.size(), 64u);
}

TEST(hilbert, consecutive_positions_are_neighbours) {
    const hilbert_order order(domain::two_d(8, 8));
    for (std::size_t p = 0; p + 1 < order.length(); ++p) {
        const auto [r0, c0] = order.cell(p);
        const auto [r1, c1] = order.cell(p + 1);
        const auto dist = (r0 > r1 ? r0 - r1 : r1 - r0) + (c0 > c1 ? c0 - c1 : c1 - c0);
        EXPECT_EQ(dist, 1u) << "position " << p;
    }
}

TEST(hilbert, padding_keeps_scale_and_ranges) {
    const auto x = grid(5, 3, [](std::size_t r, std::size_t c) { return std::int64_t(r + 3 * c + 1); });
    const hilbert_order order(x.dom());
    EXPECT_EQ(order.side(), 8u);
    EXPECT_EQ(hilbert_linearize(x, order).scale(), x.scale());
    // Every range maps to position intervals covering exactly its cells.
    const auto w = make_random_range_workload(x.dom(), 50, 4);
    const auto line = hilbert_linearize(x, order);
    const auto truth = answer_workload(w, x);
    for (std::size_t i = 0; i < w.size(); ++i) {
        double s = 0.0;
        for (const auto& [lo, hi] : order.intervals(w[i]))
            for (std::size_t p = lo; p <= hi; ++p) s += static_cast<double>(line[p]);
        EXPECT_EQ(s, truth[i]);
    }
}

TEST(quadtree, leaf_side_follows_height) {
    EXPECT_EQ(quadtree_leaf_side(domain::two_d(128, 128), 10), 1u);
    EXPECT_EQ(quadtree_leaf_side(domain::two_d(4096, 4096), 10), 4u);
    EXPECT_EQ(quadtree_leaf_side(domain::two_d(64, 64), 4), 4u);
}

TEST(quadtree, single_cell_leaves_are_data_independent) {
    const auto a = grid(16, 16, [](std::size_t, std::size_t) { return std::int64_t{40}; });
    const auto b = grid(16, 16, [](std::size_t r, std::size_t c) { return std::int64_t(r == 3 && c == 9 ? 10240 : 0); });
    const auto w = make_random_range_workload(a.dom(), 100, 2);
    // Same noise stream, same scale: the errors coincide exactly.
    for (std::uint64_t s = 0; s < 3; ++s) {
        run_context ca(rng_stream(s, 1)), cb(rng_stream(s, 1));
        EXPECT_NEAR(scaled_error(quadtree_run(a, w, 1.0, ca).answers, w, a),
                    scaled_error(quadtree_run(b, w, 1.0, cb).answers, w, b), 1e-12);
    }
}

TEST(quadtree, coarse_leaves_leave_an_error_floor) {
    const auto x = grid(64, 64, [](std::size_t r, std::size_t c) { return std::int64_t((r * 7 + c * 13) % 5 * 20); });
    const auto w = make_random_range_workload(x.dom(), 200, 1);
    const mechanism shallow = [](const data_vector& d, const workload& wl, double e, run_context& c) {
        return quadtree_run(d, wl, e, c, 4);
    };
    const double at_4 = mean_scaled_error(shallow, x, w, 1e4, 5);
    const double at_6 = mean_scaled_error(shallow, x, w, 1e6, 5);
    EXPECT_GT(at_6, 1e-5);
    EXPECT_NEAR(at_6, at_4, 0.05 * at_4);
}

TEST(quadtree, inference_is_consistent) {
    const auto x = grid(12, 12, [](std::size_t r, std::size_t c) { return std::int64_t(r * c % 7); });
    auto tree = build_aligned_tree(12, 12, true, 2, 10);
    const auto depth = tree.depths();
    const std::size_t levels = *std::max_element(depth.begin(), depth.end()) + 1;
    run_context ctx(rng_stream(1, 1));
    detail::measure_levels(tree, x, std::vector<double>(levels, 0.2), ctx);
    const auto v = tree_least_squares(tree);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (tree[i].children.empty()) continue;
        double s = 0.0;
        for (auto c : tree[i].children) s += v[c];
        EXPECT_NEAR(v[i], s, 1e-9);
    }
}

TEST(grid_sides, formulas) {
    EXPECT_EQ(ugrid_side(1000, 1.0, 10), 10u);
    EXPECT_EQ(ugrid_side(0.5, 1.0, 10), 1u);
    EXPECT_EQ(agrid_fine_side(250, 0.5, 5), 5u);
    EXPECT_EQ(agrid_fine_side(0.0, 1.0, 5), 1u);
    EXPECT_EQ(agrid_fine_side(-12.0, 1.0, 5), 1u);
    EXPECT_EQ(agrid_coarse_side(1e4, 1.0, 10), 10u);
    EXPECT_EQ(agrid_coarse_side(1e8, 1.0, 10), 791u);
}

TEST(grid_sides, equi_width_bounds_tile_the_axis) {
    EXPECT_EQ(equi_width_bounds(10, 3), (std::vector<std::size_t>{0, 3, 6, 10}));
    EXPECT_EQ(equi_width_bounds(4, 4), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_THROW(equi_width_bounds(3, 4), invalid_input);
}

TEST(grid_boxes, tile_every_cell_once) {
    for (std::size_t m : {1u, 3u, 7u, 20u}) {
        std::vector<int> hits(13 * 9, 0);
        for (const auto& b : detail::grid_boxes(0, 13, 0, 9, m))
            for (auto r = b.row0; r < b.row1; ++r)
                for (auto c = b.col0; c < b.col1; ++c) ++hits[r * 9 + c];
        for (int h : hits) EXPECT_EQ(h, 1);
    }
}

TEST(ugrid, uniform_data_has_vanishing_error) {
    const auto x = grid(32, 32, [](std::size_t, std::size_t) { return std::int64_t{25}; });
    EXPECT_LE(mean_scaled_error(ugrid, x, make_random_range_workload(x.dom(), 300, 1), 1e4, 20), 1e-3);
}

TEST(ugrid, error_falls_with_epsilon) {
    const auto x = grid(16, 16, [](std::size_t r, std::size_t c) { return std::int64_t((r * 3 + c) % 9 * 5); });
    const auto w = make_random_range_workload(x.dom(), 200, 1);
    EXPECT_LE(mean_scaled_error(ugrid, x, w, 1e4, 10), 1e-3);
    EXPECT_LT(mean_scaled_error(ugrid, x, w, 1e4, 10), mean_scaled_error(ugrid, x, w, 1.0, 10));
}

TEST(agrid, consistent_at_large_epsilon) {
    const auto x = grid(16, 16, [](std::size_t r, std::size_t c) { return std::int64_t((r * 3 + c) % 9 * 5); });
    EXPECT_LE(mean_scaled_error(agrid, x, make_random_range_workload(x.dom(), 200, 1), 1e4, 10), 1e-3);
}

TEST(agrid, error_roughly_flat_across_domain_sizes) {
    // The same smooth density at two resolutions.
    auto density = [](std::size_t side) {
        return grid(side, side, [side](std::size_t r, std::size_t c) {
            const double u = (r + 0.5) / side, v = (c + 0.5) / side;
            return std::int64_t(std::llround(2e6 * std::exp(-8 * ((u - .4) * (u - .4) + (v - .6) * (v - .6))) / (side * side)));
        });
    };
    const auto small = density(32), large = density(128);
    const double es = mean_scaled_error(agrid, small, make_random_range_workload(small.dom(), 300, 1), 0.1, 10);
    const double el = mean_scaled_error(agrid, large, make_random_range_workload(large.dom(), 300, 1), 0.1, 10);
    EXPECT_LT(el / es, 2.0);
    EXPECT_GT(el / es, 0.5);
}

TEST(dpcube, best_split_matches_oracle) {
    rng_stream rng(2, 2);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(16);
        for (auto& x : v) x = std::floor(rng.uniform() * 10);
        for (int axis : {0, 1}) EXPECT_EQ(dpcube_best_split(v, 4, {0, 4, 0, 4}, axis), oracle_split(v, 4, 4, axis));
    }
}

TEST(dpcube, separates_two_blocks) {
    // Left two columns hold 90 per cell, the right two hold 10.
    const auto x = grid(4, 4, [](std::size_t, std::size_t c) { return std::int64_t(c < 2 ? 90 : 10); });
    const auto v = x.as_reals();
    EXPECT_EQ(dpcube_best_split(v, 4, {0, 4, 0, 4}, 1), oracle_split(v, 4, 4, 1));
    EXPECT_EQ(dpcube_best_split(v, 4, {0, 4, 0, 4}, 1), 2u);
    const auto boxes = dpcube_boxes(v, x.dom(), 1e-8, 10);
    for (const auto& b : boxes) EXPECT_TRUE(b.col1 <= 2 || b.col0 >= 2);
    EXPECT_LE(mean_scaled_error(dpcube, x, make_random_range_workload(x.dom(), 50, 1), 1e4, 10), 1e-3);
}

TEST(dpcube, huge_noise_multiple_keeps_one_box) {
    const auto x = grid(8, 8, [](std::size_t r, std::size_t c) { return std::int64_t(r * c); });
    const auto boxes = dpcube_boxes(x.as_reals(), x.dom(), 1.0, 1e12);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].cell_count(), 64u);
}

TEST(dpcube, boxes_tile_the_domain) {
    const auto x = grid(9, 7, [](std::size_t r, std::size_t c) { return std::int64_t((r * 5 + c * 3) % 11); });
    rng_stream rng(4, 4);
    auto v = x.as_reals();
    for (auto& e : v) e += rng.laplace(1.0);
    std::vector<int> hits(63, 0);
    for (const auto& b : dpcube_boxes(v, x.dom(), 2.0, 1.0))
        for (auto r = b.row0; r < b.row1; ++r)
            for (auto c = b.col0; c < b.col1; ++c) ++hits[r * 7 + c];
    for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(data_dependent_2d, budgets_balance) {
    const auto x = grid(16, 16, [](std::size_t r, std::size_t c) { return std::int64_t((r + c) % 4 * 30); });
    const auto w = make_random_range_workload(x.dom(), 40, 1);
    for (const auto& m : {quadtree, ugrid, agrid, dpcube, dawa, greedy}) {
        budget_ledger ledger;
        run_context ctx(rng_stream(2, 2), &ledger);
        const auto r = m(x, w, 0.9, ctx);
        EXPECT_TRUE(ledger.balances(0.9)) << ledger.total();
        for (double a : r.answers) EXPECT_TRUE(std::isfinite(a));
    }
}

TEST(data_dependent_2d, linearized_mechanisms_are_consistent) {
    const auto x = grid(8, 8, [](std::size_t r, std::size_t c) { return std::int64_t((r * 3 + c * 5) % 7 * 40); });
    const auto w = make_random_range_workload(x.dom(), 100, 1);
    EXPECT_LE(mean_scaled_error(dawa, x, w, 1e4, 10), 1e-3);
    EXPECT_LE(mean_scaled_error(greedy, x, w, 1e4, 10), 1e-3);
}
