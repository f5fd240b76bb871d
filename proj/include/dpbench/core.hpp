#pragma once

// Domain, histogram and workload types shared by every mechanism, plus exact
// query answering.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpbench/errors.hpp"
#include "dpbench/rng.hpp"

namespace dpbench {

/// A 1D or 2D grid of cells. 2D cells are flattened row-major (axis 0 = rows).
class domain {
public:
    static domain one_d(std::size_t n) { return domain({n}); }
    static domain two_d(std::size_t rows, std::size_t cols) { return domain({rows, cols}); }

    explicit domain(std::vector<std::size_t> axis_sizes) : sizes_(std::move(axis_sizes)) {
        detail::require(sizes_.size() == 1 || sizes_.size() == 2, "domain: only 1D and 2D domains are supported");
        for (auto s : sizes_) detail::require(s >= 1, "domain: axis sizes must be positive");
    }

    std::size_t dims() const noexcept { return sizes_.size(); }
    std::size_t size(std::size_t axis) const { return sizes_.at(axis); }
    const std::vector<std::size_t>& axis_sizes() const noexcept { return sizes_; }
    std::size_t cells() const noexcept {
        return std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{1}, std::multiplies<>());
    }
    std::size_t rows() const noexcept { return sizes_[0]; }
    std::size_t cols() const noexcept { return dims() == 2 ? sizes_[1] : 1; }

    std::size_t index(std::size_t r, std::size_t c) const noexcept { return r * cols() + c; }

    std::string to_string() const {
        return dims() == 1 ? std::to_string(sizes_[0])
                           : std::to_string(sizes_[0]) + "x" + std::to_string(sizes_[1]);
    }

    friend bool operator==(const domain&, const domain&) = default;

private:
    std::vector<std::size_t> sizes_;
};

/// Non-negative integer histogram over a domain; `scale()` is the record count.
class data_vector {
public:
    data_vector(domain d, std::vector<std::int64_t> counts) : domain_(std::move(d)), counts_(std::move(counts)) {
        detail::require(counts_.size() == domain_.cells(), "data_vector: count length does not match domain");
        for (auto c : counts_) {
            detail::require(c >= 0, "data_vector: counts must be non-negative");
            scale_ += c;
        }
    }

    const domain& dom() const noexcept { return domain_; }
    std::span<const std::int64_t> counts() const noexcept { return counts_; }
    std::int64_t operator[](std::size_t i) const { return counts_[i]; }
    std::size_t size() const noexcept { return counts_.size(); }
    std::int64_t scale() const noexcept { return scale_; }

    std::vector<double> as_reals() const { return {counts_.begin(), counts_.end()}; }

    /// Element-wise scaling by a positive integer; keeps the shape fixed.
    data_vector scaled_by(std::int64_t factor) const {
        detail::require(factor >= 1, "scaled_by: factor must be positive");
        std::vector<std::int64_t> out(counts_);
        for (auto& c : out) c *= factor;
        return {domain_, std::move(out)};
    }

private:
    domain domain_;
    std::vector<std::int64_t> counts_;
    std::int64_t scale_ = 0;
};

/// Normalized histogram: non-negative probabilities summing to one.
class shape {
public:
    shape(domain d, std::vector<double> probs) : domain_(std::move(d)), probs_(std::move(probs)) {
        detail::require(probs_.size() == domain_.cells(), "shape: length does not match domain");
        double total = 0.0;
        for (double p : probs_) {
            detail::require(p >= 0.0 && std::isfinite(p), "shape: probabilities must be finite and non-negative");
            total += p;
        }
        detail::require(std::abs(total - 1.0) <= 1e-9, "shape: probabilities must sum to one");
    }

    const domain& dom() const noexcept { return domain_; }
    std::span<const double> probs() const noexcept { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::size_t size() const noexcept { return probs_.size(); }

private:
    domain domain_;
    std::vector<double> probs_;
};

/// Axis-aligned range with inclusive 0-based bounds. Unused second axis is [0, 0].
struct range_query {
    std::array<std::size_t, 2> lo{0, 0};
    std::array<std::size_t, 2> hi{0, 0};

    static range_query interval(std::size_t lo, std::size_t hi) { return {{lo, 0}, {hi, 0}}; }
    static range_query rect(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
        return {{r0, c0}, {r1, c1}};
    }

    std::size_t cell_count() const noexcept { return (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1); }
    bool contains(std::size_t r, std::size_t c) const noexcept {
        return r >= lo[0] && r <= hi[0] && c >= lo[1] && c <= hi[1];
    }

    friend bool operator==(const range_query&, const range_query&) = default;
};

/// An ordered, non-empty list of range queries over one domain.
class workload {
public:
    workload(domain d, std::vector<range_query> queries) : domain_(std::move(d)), queries_(std::move(queries)) {
        detail::require(!queries_.empty(), "workload: at least one query is required");
        for (const auto& q : queries_) {
            for (std::size_t a = 0; a < 2; ++a) {
                const std::size_t n = a < domain_.dims() ? domain_.size(a) : 1;
                detail::require(q.lo[a] <= q.hi[a] && q.hi[a] < n, "workload: query bounds outside the domain");
            }
        }
    }

    const domain& dom() const noexcept { return domain_; }
    std::span<const range_query> queries() const noexcept { return queries_; }
    std::size_t size() const noexcept { return queries_.size(); }
    const range_query& operator[](std::size_t i) const { return queries_[i]; }

private:
    domain domain_;
    std::vector<range_query> queries_;
};

/// A positive, finite epsilon.
class privacy_budget {
public:
    explicit privacy_budget(double epsilon) : eps_(epsilon) {
        detail::require(std::isfinite(epsilon) && epsilon > 0.0, "privacy budget must be positive and finite");
    }
    double epsilon() const noexcept { return eps_; }

private:
    double eps_;
};

namespace detail {

/// Summed-area table with a zero border: table[(r+1)*(cols+1) + (c+1)] = sum of cells [0..r]x[0..c].
template <typename T>
std::vector<double> summed_area(const domain& d, std::span<const T> cells) {
    const std::size_t rows = d.rows(), cols = d.cols();
    std::vector<double> table((rows + 1) * (cols + 1), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            row_sum += static_cast<double>(cells[r * cols + c]);
            table[(r + 1) * (cols + 1) + c + 1] = table[r * (cols + 1) + c + 1] + row_sum;
        }
    }
    return table;
}

inline double rect_sum(const std::vector<double>& table, std::size_t cols, const range_query& q) {
    const std::size_t w = cols + 1;
    return table[(q.hi[0] + 1) * w + q.hi[1] + 1] - table[q.lo[0] * w + q.hi[1] + 1] -
           table[(q.hi[0] + 1) * w + q.lo[1]] + table[q.lo[0] * w + q.lo[1]];
}

} // namespace detail

/// Answers every query of `w` on a cell vector (counts or estimates).
template <typename T>
std::vector<double> answer_workload(const workload& w, const domain& d, std::span<const T> cells) {
    detail::require(w.dom() == d, "answer_workload: workload and data have different domains");
    detail::require(cells.size() == d.cells(), "answer_workload: cell vector length does not match domain");
    std::vector<double> out;
    out.reserve(w.size());
    if (d.dims() == 1) {
        // Integer prefix sums are exact for counts; doubles are fine for estimates.
        std::vector<double> prefix(cells.size() + 1, 0.0);
        for (std::size_t i = 0; i < cells.size(); ++i) prefix[i + 1] = prefix[i] + static_cast<double>(cells[i]);
        for (const auto& q : w.queries()) out.push_back(prefix[q.hi[0] + 1] - prefix[q.lo[0]]);
        return out;
    }
    const auto table = detail::summed_area(d, cells);
    for (const auto& q : w.queries()) out.push_back(detail::rect_sum(table, d.cols(), q));
    return out;
}

inline std::vector<double> answer_workload(const workload& w, const data_vector& x) {
    return answer_workload<std::int64_t>(w, x.dom(), x.counts());
}

inline shape shape_of(const data_vector& x) {
    if (x.scale() == 0) throw undefined_shape("shape_of: histogram has zero scale");
    std::vector<double> p(x.size());
    const double s = static_cast<double>(x.scale());
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = static_cast<double>(x[i]) / s;
    return {x.dom(), std::move(p)};
}

namespace detail {

inline domain coarsened_domain(const domain& d, std::span<const std::size_t> factors) {
    require(factors.size() == d.dims(), "coarsen: one factor per axis is required");
    std::vector<std::size_t> sizes;
    for (std::size_t a = 0; a < d.dims(); ++a) {
        require(factors[a] >= 1 && d.size(a) % factors[a] == 0, "coarsen: factor must divide the axis size");
        sizes.push_back(d.size(a) / factors[a]);
    }
    return domain(sizes);
}

template <typename T>
std::vector<T> coarsen_cells(const domain& from, const domain& to, std::span<const T> cells) {
    std::vector<T> out(to.cells(), T{});
    const std::size_t fr = from.rows() / to.rows(), fc = from.cols() / to.cols();
    for (std::size_t r = 0; r < from.rows(); ++r)
        for (std::size_t c = 0; c < from.cols(); ++c) out[(r / fr) * to.cols() + c / fc] += cells[r * from.cols() + c];
    return out;
}

} // namespace detail

/// Groups adjacent cells into blocks of `factors[axis]` cells per axis.
inline data_vector coarsen(const data_vector& x, std::span<const std::size_t> factors) {
    const domain to = detail::coarsened_domain(x.dom(), factors);
    return {to, detail::coarsen_cells<std::int64_t>(x.dom(), to, x.counts())};
}

inline data_vector coarsen(const data_vector& x, std::initializer_list<std::size_t> factors) {
    return coarsen(x, std::span<const std::size_t>(factors.begin(), factors.size()));
}

inline shape coarsen(const shape& p, std::span<const std::size_t> factors) {
    const domain to = detail::coarsened_domain(p.dom(), factors);
    auto probs = detail::coarsen_cells<double>(p.dom(), to, p.probs());
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (auto& v : probs) v /= total;
    return {to, std::move(probs)};
}

/// Coarsens `x` onto `target`, which must evenly divide every axis.
inline data_vector coarsen_to(const data_vector& x, const domain& target) {
    detail::require(target.dims() == x.dom().dims(), "coarsen_to: dimensionality mismatch");
    std::vector<std::size_t> f;
    for (std::size_t a = 0; a < target.dims(); ++a) {
        detail::require(x.dom().size(a) % target.size(a) == 0, "coarsen_to: target size must divide the source size");
        f.push_back(x.dom().size(a) / target.size(a));
    }
    return coarsen(x, std::span<const std::size_t>(f));
}

inline shape coarsen_to(const shape& p, const domain& target) {
    detail::require(target.dims() == p.dom().dims(), "coarsen_to: dimensionality mismatch");
    std::vector<std::size_t> f;
    for (std::size_t a = 0; a < target.dims(); ++a) {
        detail::require(p.dom().size(a) % target.size(a) == 0, "coarsen_to: target size must divide the source size");
        f.push_back(p.dom().size(a) / target.size(a));
    }
    return coarsen(p, std::span<const std::size_t>(f));
}

/// The n ranges [0, i] of a 1D domain.
inline workload make_prefix_workload(const domain& d) {
    detail::require(d.dims() == 1, "prefix workload is defined for 1D domains only");
    std::vector<range_query> qs;
    qs.reserve(d.cells());
    for (std::size_t i = 0; i < d.cells(); ++i) qs.push_back(range_query::interval(0, i));
    return {d, std::move(qs)};
}

inline workload make_prefix_workload(std::size_t n) { return make_prefix_workload(domain::one_d(n)); }

/// One single-cell query per cell, in cell order.
inline workload make_identity_workload(const domain& d) {
    std::vector<range_query> qs;
    qs.reserve(d.cells());
    for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c) qs.push_back(range_query::rect(r, r, c, c));
    return {d, std::move(qs)};
}

/// `count` random ranges: per axis, two independent uniform cell indices, ordered.
inline workload make_random_range_workload(const domain& d, std::size_t count, std::uint64_t seed) {
    detail::require(count >= 1, "random range workload needs at least one query");
    rng_stream rng(seed, 0x72616e6765ULL);
    std::vector<range_query> qs;
    qs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        range_query q;
        for (std::size_t a = 0; a < d.dims(); ++a) {
            const auto u = static_cast<std::size_t>(rng.uniform_index(d.size(a)));
            const auto v = static_cast<std::size_t>(rng.uniform_index(d.size(a)));
            q.lo[a] = std::min(u, v);
            q.hi[a] = std::max(u, v);
        }
        qs.push_back(q);
    }
    return {d, std::move(qs)};
}

} // namespace dpbench
