#pragma once

// MWEM: repeatedly pick the worst-answered workload query privately, measure it, and
// apply a multiplicative-weights update to a synthetic histogram.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpbench/algo/result.hpp"
#include "dpbench/dp/exponential.hpp"

namespace dpbench {

struct mwem_options {
    std::size_t rounds = 10;
    double assumed_scale = 0.0; ///< 0 means the true scale
    bool average_iterates = true;
    /// Multiplicative-weights passes over every measurement taken so far, per round.
    /// 0 applies only the newest measurement, once.
    std::size_t update_passes = 0;
};

inline mechanism_result mwem_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx,
                                 const mwem_options& opts = {}) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(opts.rounds >= 1, "mwem: at least one round is required");
    detail::require(opts.assumed_scale >= 0.0, "mwem: assumed scale must be non-negative");
    detail::require(w.size() > 0, "mwem: empty workload");
    const double start = ctx.spent();
    const std::size_t n = x.size();
    double scale = opts.assumed_scale > 0.0 ? opts.assumed_scale : static_cast<double>(x.scale());
    if (scale <= 0.0) scale = 1.0;
    const double t_count = static_cast<double>(opts.rounds);
    const double step_eps = epsilon / (2.0 * t_count);

    const auto truth = answer_workload(w, x);
    std::vector<double> est(n, scale / static_cast<double>(n));
    /// Weights live in log space so that large corrections cannot overflow.
    std::vector<double> log_w(n, 0.0);
    std::vector<double> sum(n, 0.0);
    std::vector<std::pair<std::size_t, double>> measurements;
    const auto& queries = w.queries();
    const std::size_t cols = x.dom().cols();
    for (std::size_t t = 0; t < opts.rounds; ++t) {
        const auto current = answer_workload<double>(w, x.dom(), est);
        std::vector<double> scores(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) scores[i] = std::abs(truth[i] - current[i]);
        const std::size_t pick = exponential_mechanism(scores, step_eps, 1.0, ctx.rng());
        ctx.spend("round " + std::to_string(t) + " select", step_eps);
        const double measured = truth[pick] + ctx.rng().laplace(1.0 / step_eps);
        ctx.spend("round " + std::to_string(t) + " measure", step_eps);

        measurements.emplace_back(pick, measured);

        const std::size_t passes = std::max<std::size_t>(opts.update_passes, 1);
        const std::size_t first = opts.update_passes == 0 ? measurements.size() - 1 : 0;
        for (std::size_t pass = 0; pass < passes; ++pass) {
            for (std::size_t j = first; j < measurements.size(); ++j) {
                const auto [qi, m] = measurements[j];
                const auto& q = queries[qi];
                double answer = 0.0;
                for (std::size_t r = q.lo[0]; r <= q.hi[0]; ++r)
                    for (std::size_t c = q.lo[1]; c <= q.hi[1]; ++c) answer += est[r * cols + c];
                const double step = (m - answer) / (2.0 * scale);
                for (std::size_t r = q.lo[0]; r <= q.hi[0]; ++r)
                    for (std::size_t c = q.lo[1]; c <= q.hi[1]; ++c) log_w[r * cols + c] += step;
                const double top = *std::max_element(log_w.begin(), log_w.end());
                double total = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    est[i] = std::exp(log_w[i] - top);
                    total += est[i];
                }
                for (auto& v : est) v *= scale / total;
            }
        }
        for (std::size_t i = 0; i < n; ++i) sum[i] += est[i];
    }
    if (opts.average_iterates)
        for (std::size_t i = 0; i < n; ++i) est[i] = sum[i] / t_count;
    return detail::finish(w, x.dom(), std::move(est), ctx.spent() - start);
}

} // namespace dpbench
