#pragma once

// Matrix-mechanism strategies: measure linear queries with Laplace noise, then
// reconstruct cell estimates by least squares.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <vector>

#include "dpbench/core.hpp"
#include "dpbench/dp/laplace.hpp"
#include "dpbench/errors.hpp"

namespace dpbench {

using sparse_rows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A set of linear queries over n cells, one row per query.
class strategy_spec {
public:
    explicit strategy_spec(sparse_rows rows) : rows_(std::move(rows)) {
        rows_.makeCompressed();
        detail::require(rows_.rows() >= 1 && rows_.cols() >= 1, "strategy_spec: empty strategy");
        Eigen::VectorXd col_l1 = Eigen::VectorXd::Zero(rows_.cols());
        for (Eigen::Index r = 0; r < rows_.outerSize(); ++r)
            for (sparse_rows::InnerIterator it(rows_, r); it; ++it) col_l1[it.col()] += std::abs(it.value());
        sensitivity_ = col_l1.maxCoeff();
        detail::require(sensitivity_ > 0.0, "strategy_spec: sensitivity must be positive");
    }

    const sparse_rows& rows() const noexcept { return rows_; }
    std::size_t query_count() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t cell_count() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
    /// Largest column L1 norm: how far one record can move the answer vector.
    double sensitivity() const noexcept { return sensitivity_; }

private:
    sparse_rows rows_;
    double sensitivity_ = 0.0;
};

inline strategy_spec identity_strategy(std::size_t n) {
    sparse_rows s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    s.setIdentity();
    return strategy_spec(std::move(s));
}

/// Unnormalized Haar strategy (entries +-1): the all-ones row plus, for every dyadic
/// block, its left half minus its right half. n must be a power of two.
inline strategy_spec haar_strategy(std::size_t n) {
    detail::require(std::has_single_bit(n), "haar_strategy: n must be a power of two");
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < n; ++c) trips.emplace_back(row, static_cast<Eigen::Index>(c), 1.0);
    ++row;
    for (std::size_t block = n; block >= 2; block /= 2) {
        for (std::size_t start = 0; start < n; start += block, ++row) {
            for (std::size_t c = 0; c < block; ++c)
                trips.emplace_back(row, static_cast<Eigen::Index>(start + c), c < block / 2 ? 1.0 : -1.0);
        }
    }
    sparse_rows s(row, static_cast<Eigen::Index>(n));
    s.setFromTriplets(trips.begin(), trips.end());
    return strategy_spec(std::move(s));
}

/// Every node of a b-ary interval tree over n cells (root first, leaves are single cells).
inline strategy_spec hierarchical_strategy(std::size_t n, std::size_t b) {
    detail::require(b >= 2, "hierarchical_strategy: branching must be at least 2");
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::Index row = 0;
    std::vector<std::pair<std::size_t, std::size_t>> level{{0, n}}, next;
    while (!level.empty()) {
        next.clear();
        for (auto [lo, hi] : level) {
            for (std::size_t c = lo; c < hi; ++c) trips.emplace_back(row, static_cast<Eigen::Index>(c), 1.0);
            ++row;
            const std::size_t len = hi - lo;
            if (len <= 1) continue;
            const std::size_t parts = std::min(b, len);
            for (std::size_t k = 0; k < parts; ++k) next.emplace_back(lo + len * k / parts, lo + len * (k + 1) / parts);
        }
        level.swap(next);
    }
    sparse_rows s(row, static_cast<Eigen::Index>(n));
    s.setFromTriplets(trips.begin(), trips.end());
    return strategy_spec(std::move(s));
}

/// Precomputed least-squares reconstruction for a strategy (reusable across runs).
class strategy_solver {
public:
    explicit strategy_solver(const strategy_spec& s) : spec_(&s) {
        const auto& a = s.rows();
        // Square strategies with mutually orthogonal rows invert as A^T D^-1.
        if (a.rows() == a.cols()) {
            const sparse_rows gram = a * sparse_rows(a.transpose());
            bool diagonal = true;
            for (Eigen::Index r = 0; r < gram.outerSize() && diagonal; ++r)
                for (sparse_rows::InnerIterator it(gram, r); it; ++it)
                    if (it.col() != r && std::abs(it.value()) > 1e-12) diagonal = false;
            if (diagonal) {
                row_norm2_ = Eigen::VectorXd(a.rows());
                for (Eigen::Index r = 0; r < a.rows(); ++r) {
                    row_norm2_[r] = gram.coeff(r, r);
                    detail::require(row_norm2_[r] > 0.0, "run_strategy: strategy is rank deficient");
                }
                return;
            }
        }
        const Eigen::MatrixXd normal = Eigen::MatrixXd(sparse_rows(a.transpose()) * a);
        ldlt_.emplace(normal);
        const auto d = ldlt_->vectorD().cwiseAbs();
        detail::require(ldlt_->info() == Eigen::Success && d.minCoeff() > 1e-10 * std::max(1.0, d.maxCoeff()),
                        "run_strategy: strategy is rank deficient");
    }

    /// Least-squares cell estimates from noisy strategy answers.
    Eigen::VectorXd solve(const Eigen::VectorXd& answers) const {
        const auto& a = spec_->rows();
        if (ldlt_) return ldlt_->solve(Eigen::VectorXd(a.transpose() * answers));
        return a.transpose() * answers.cwiseQuotient(row_norm2_);
    }

    const strategy_spec& spec() const noexcept { return *spec_; }

private:
    const strategy_spec* spec_;
    Eigen::VectorXd row_norm2_;
    std::optional<Eigen::LDLT<Eigen::MatrixXd>> ldlt_;
};

/// Answers the strategy with Laplace(sensitivity / epsilon) noise per row and returns
/// the least-squares cell estimates.
inline std::vector<double> run_strategy(const strategy_solver& solver, std::span<const double> cells, double epsilon,
                                        rng_stream& rng) {
    const auto& s = solver.spec();
    detail::require(cells.size() == s.cell_count(), "run_strategy: data length does not match the strategy");
    const Eigen::Map<const Eigen::VectorXd> x(cells.data(), static_cast<Eigen::Index>(cells.size()));
    Eigen::VectorXd y = s.rows() * x;
    const auto noise = laplace_vector(s.sensitivity(), epsilon, s.query_count(), rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise[static_cast<std::size_t>(i)];
    const Eigen::VectorXd est = solver.solve(y);
    return {est.data(), est.data() + est.size()};
}

inline std::vector<double> run_strategy(const strategy_spec& s, const data_vector& x, double epsilon, rng_stream& rng) {
    const strategy_solver solver(s);
    const auto cells = x.as_reals();
    return run_strategy(solver, cells, epsilon, rng);
}

} // namespace dpbench
