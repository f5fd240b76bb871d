#pragma once

// Bucket partitions and the helpers the partitioning mechanisms share.

#include <algorithm>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "dpbench/core.hpp"
#include "dpbench/errors.hpp"

namespace dpbench {

/// Disjoint contiguous half-open buckets [first, second) covering [0, n), with one
/// (noisy) count per bucket.
struct partition {
    std::vector<std::pair<std::size_t, std::size_t>> buckets;
    std::vector<double> counts;

    std::size_t size() const noexcept { return buckets.size(); }

    void validate(std::size_t n) const {
        detail::require(!buckets.empty(), "partition: no buckets");
        detail::require(counts.empty() || counts.size() == buckets.size(), "partition: one count per bucket");
        std::size_t next = 0;
        for (const auto& [lo, hi] : buckets) {
            detail::require(lo == next && hi > lo, "partition: buckets must be contiguous, ordered and non-empty");
            next = hi;
        }
        detail::require(next == n, "partition: buckets must cover the domain");
    }

    /// Bucket index of every cell.
    std::vector<std::size_t> bucket_of_cell() const {
        std::vector<std::size_t> out(buckets.back().second);
        for (std::size_t b = 0; b < buckets.size(); ++b)
            for (std::size_t i = buckets[b].first; i < buckets[b].second; ++i) out[i] = b;
        return out;
    }
};

/// Uniform expansion: every cell of bucket B receives count(B) / |B|.
inline std::vector<double> expand_uniform(const partition& p, std::size_t n) {
    p.validate(n);
    detail::require(p.counts.size() == p.buckets.size(), "expand_uniform: partition has no counts");
    std::vector<double> out(n);
    for (std::size_t b = 0; b < p.size(); ++b) {
        const auto [lo, hi] = p.buckets[b];
        const double per = p.counts[b] / static_cast<double>(hi - lo);
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(lo), out.begin() + static_cast<std::ptrdiff_t>(hi), per);
    }
    return out;
}

inline std::vector<double> expand_uniform(const partition& p, const domain& d) { return expand_uniform(p, d.cells()); }

/// Uniform expansion over arbitrary (non-contiguous) cell groups.
inline std::vector<double> expand_groups(const std::vector<std::vector<std::size_t>>& groups,
                                         std::span<const double> group_counts, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double per = group_counts[g] / static_cast<double>(groups[g].size());
        for (auto c : groups[g]) out[c] = per;
    }
    return out;
}

/// Sum of absolute deviations from the mean, for a growing set of cells.
///
/// Values are ranked once; a pair of Fenwick trees over the ranks gives the count and
/// sum of inserted values at or below the current mean in O(log n).
class deviation_tracker {
public:
    explicit deviation_tracker(std::span<const double> values) : values_(values.begin(), values.end()) {
        sorted_ = values_;
        std::sort(sorted_.begin(), sorted_.end());
        sorted_.erase(std::unique(sorted_.begin(), sorted_.end()), sorted_.end());
        rank_.resize(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i)
            rank_[i] = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), values_[i]) - sorted_.begin());
        cnt_.assign(sorted_.size() + 1, 0.0);
        sum_.assign(sorted_.size() + 1, 0.0);
    }

    void clear() {
        std::fill(cnt_.begin(), cnt_.end(), 0.0);
        std::fill(sum_.begin(), sum_.end(), 0.0);
        count_ = 0;
        total_ = 0.0;
    }

    void insert(std::size_t cell) {
        for (std::size_t i = rank_[cell] + 1; i < cnt_.size(); i += i & (~i + 1)) {
            cnt_[i] += 1.0;
            sum_[i] += values_[cell];
        }
        ++count_;
        total_ += values_[cell];
    }

    void erase(std::size_t cell) {
        for (std::size_t i = rank_[cell] + 1; i < cnt_.size(); i += i & (~i + 1)) {
            cnt_[i] -= 1.0;
            sum_[i] -= values_[cell];
        }
        --count_;
        total_ -= values_[cell];
    }

    double deviation() const {
        if (count_ == 0) return 0.0;
        const double mean = total_ / static_cast<double>(count_);
        std::size_t upto = static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), mean) - sorted_.begin());
        double c = 0.0, s = 0.0;
        for (std::size_t i = upto; i > 0; i -= i & (~i + 1)) {
            c += cnt_[i];
            s += sum_[i];
        }
        const double below = mean * c - s;
        const double above = (total_ - s) - mean * (static_cast<double>(count_) - c);
        return std::max(0.0, below + above);
    }

    std::size_t count() const noexcept { return count_; }
    double total() const noexcept { return total_; }

private:
    std::vector<double> values_, sorted_;
    std::vector<std::size_t> rank_;
    std::vector<double> cnt_, sum_;
    std::size_t count_ = 0;
    double total_ = 0.0;
};

/// Sum of absolute deviations from the mean over cells [lo, hi), computed directly.
inline double abs_deviation(std::span<const double> x, std::size_t lo, std::size_t hi) {
    if (hi <= lo) return 0.0;
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += x[i];
    mean /= static_cast<double>(hi - lo);
    double dev = 0.0;
    for (std::size_t i = lo; i < hi; ++i) dev += std::abs(x[i] - mean);
    return dev;
}

/// Exact bucket sums of a 1D count vector.
inline std::vector<double> bucket_sums(std::span<const std::int64_t> counts,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& buckets) {
    std::vector<double> out;
    out.reserve(buckets.size());
    for (const auto& [lo, hi] : buckets) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += static_cast<double>(counts[i]);
        out.push_back(s);
    }
    return out;
}

} // namespace dpbench
