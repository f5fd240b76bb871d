#pragma once

// Scaled per-query error, sample summaries and the bias/variance split.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dpbench/core.hpp"

namespace dpbench {

/// ||truth - estimate||_2 / (scale * q).
inline double scaled_error(std::span<const double> estimate, std::span<const double> truth, double scale) {
    detail::require(estimate.size() == truth.size(), "scaled_error: answer lengths differ");
    detail::require(!truth.empty(), "scaled_error: empty workload");
    detail::require(scale > 0.0, "scaled_error: scale must be positive");
    double ss = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) ss += (truth[i] - estimate[i]) * (truth[i] - estimate[i]);
    return std::sqrt(ss) / (scale * static_cast<double>(truth.size()));
}

inline double scaled_error(std::span<const double> estimate, const workload& w, const data_vector& x) {
    const auto truth = answer_workload(w, x);
    return scaled_error(estimate, truth, static_cast<double>(x.scale()));
}

/// Mean, nearest-rank 95th percentile and standard error of a sample.
struct sample_summary {
    std::size_t count = 0;
    double mean = 0.0;
    double p95 = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Nearest-rank quantile: the ceil(p * n)-th smallest value.
inline double nearest_rank(std::vector<double> v, double p) {
    detail::require(!v.empty(), "nearest_rank: empty sample");
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

inline sample_summary summarize(std::span<const double> v) {
    sample_summary s;
    s.count = v.size();
    if (v.empty()) return s;
    for (double e : v) s.mean += e;
    s.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) ss += (e - s.mean) * (e - s.mean);
    s.variance = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
    s.std_error = std::sqrt(s.variance / static_cast<double>(v.size()));
    s.p95 = nearest_rank({v.begin(), v.end()}, 0.95);
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    return s;
}

struct bias_variance_split {
    double bias = 0.0;     ///< ||mean(estimates) - truth||_2 / (scale * q)
    double variance = 0.0; ///< mean over queries of the per-query sample variance
};

inline bias_variance_split bias_variance(const std::vector<std::vector<double>>& estimates, std::span<const double> truth,
                                         double scale) {
    detail::require(estimates.size() >= 2, "bias_variance: at least two samples are required");
    const std::size_t q = truth.size();
    std::vector<double> mean(q, 0.0);
    for (const auto& e : estimates) {
        detail::require(e.size() == q, "bias_variance: answer lengths differ");
        for (std::size_t i = 0; i < q; ++i) mean[i] += e[i];
    }
    const double k = static_cast<double>(estimates.size());
    for (auto& m : mean) m /= k;
    bias_variance_split out;
    out.bias = scaled_error(mean, truth, scale);
    double var = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        double ss = 0.0;
        for (const auto& e : estimates) ss += (e[i] - mean[i]) * (e[i] - mean[i]);
        var += ss / (k - 1.0);
    }
    out.variance = var / static_cast<double>(q);
    return out;
}

} // namespace dpbench
