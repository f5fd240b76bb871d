#pragma once

// Welch t-tests, competitive sets and regret.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "dpbench/harness/metrics.hpp"

namespace dpbench {

struct t_test_result {
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0; ///< two-sided
};

/// Welch's unequal-variance t-test. Two zero-variance samples compare exactly:
/// p = 1 when the means are equal and 0 otherwise.
inline t_test_result welch_t_test(std::span<const double> a, std::span<const double> b) {
    detail::require(a.size() >= 2 && b.size() >= 2, "welch_t_test: each sample needs at least two values");
    const auto sa = summarize(a), sb = summarize(b);
    const double va = sa.variance / static_cast<double>(a.size());
    const double vb = sb.variance / static_cast<double>(b.size());
    t_test_result r;
    if (va + vb == 0.0) {
        r.t = sa.mean == sb.mean ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), sa.mean - sb.mean);
        r.df = static_cast<double>(a.size() + b.size() - 2);
        r.p_value = sa.mean == sb.mean ? 1.0 : 0.0;
        return r;
    }
    r.t = (sa.mean - sb.mean) / std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) /
           (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    const boost::math::students_t dist(r.df);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    return r;
}

/// Bonferroni-corrected level used when comparing against the best of n algorithms.
inline double bonferroni_alpha(std::size_t n_algorithms, double alpha = 0.05) {
    detail::require(n_algorithms >= 2, "bonferroni_alpha: at least two algorithms are required");
    return alpha / static_cast<double>(n_algorithms - 1);
}

/// Algorithms whose mean error is not significantly above the lowest mean.
inline std::vector<std::string> competitive_set(const std::map<std::string, std::vector<double>>& samples,
                                                double alpha = 0.05) {
    detail::require(samples.size() >= 2, "competitive_set: at least two algorithms are required");
    const double level = bonferroni_alpha(samples.size(), alpha);
    std::string best;
    double best_mean = std::numeric_limits<double>::infinity();
    for (const auto& [name, v] : samples) {
        const double m = summarize(v).mean;
        if (m < best_mean) {
            best_mean = m;
            best = name;
        }
    }
    std::vector<std::string> out;
    for (const auto& [name, v] : samples) {
        if (name == best) {
            out.push_back(name);
            continue;
        }
        const auto t = welch_t_test(v, samples.at(best));
        if (!(t.p_value < level && t.t > 0.0)) out.push_back(name);
    }
    return out;
}

/// Geometric mean over settings of each algorithm's mean error divided by the best
/// mean in that setting. `means[alg][setting]`.
inline std::map<std::string, double> regret(const std::map<std::string, std::vector<double>>& means) {
    detail::require(!means.empty(), "regret: no algorithms");
    const std::size_t settings = means.begin()->second.size();
    detail::require(settings > 0, "regret: no settings");
    std::vector<double> best(settings, std::numeric_limits<double>::infinity());
    for (const auto& [name, v] : means) {
        detail::require(v.size() == settings, "regret: algorithm '" + name + "' is missing settings");
        for (std::size_t s = 0; s < settings; ++s) best[s] = std::min(best[s], v[s]);
    }
    for (std::size_t s = 0; s < settings; ++s)
        detail::require(best[s] > 0.0, "regret: best error is zero in setting " + std::to_string(s));
    std::map<std::string, double> out;
    for (const auto& [name, v] : means) {
        double log_sum = 0.0;
        for (std::size_t s = 0; s < settings; ++s) log_sum += std::log(v[s] / best[s]);
        out[name] = std::exp(log_sum / static_cast<double>(settings));
    }
    return out;
}

} // namespace dpbench
