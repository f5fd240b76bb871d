#pragma once

// Property checks: scale-epsilon exchangeability, consistency and budget accounting.

#include <string>
#include <vector>

#include "dpbench/harness/registry.hpp"
#include "dpbench/harness/stats.hpp"
#include "dpbench/harness/trials.hpp"

namespace dpbench {

struct exchangeability_verdict {
    bool passed = false;
    double mean_base = 0.0;   ///< mean scaled error at (m, epsilon)
    double mean_scaled = 0.0; ///< mean scaled error at (c * m, epsilon / c)
    t_test_result test;
};

/// Compares errors on (x, epsilon) against (c * x, epsilon / c) with a Welch t-test;
/// passes when the difference is not significant at `alpha`.
inline exchangeability_verdict check_exchangeability(const algorithm_info& alg, const data_vector& x, double epsilon,
                                                     std::int64_t factor, const workload& w, std::size_t trials,
                                                     std::uint64_t seed, double alpha = 0.01,
                                                     const run_settings& settings = {}, std::size_t workers = 1) {
    detail::require(factor >= 1, "check_exchangeability: factor must be a positive integer");
    detail::require(trials >= 2, "check_exchangeability: at least two trials are required");
    const data_vector big = x.scaled_by(factor);
    const auto truth_a = answer_workload(w, x);
    const auto truth_b = answer_workload(w, big);
    std::vector<double> a(trials), b(trials);
    detail::parallel_for(2 * trials, workers, [&](std::size_t i) {
        const bool second = i >= trials;
        const std::size_t t = second ? i - trials : i;
        run_context ctx(rng_stream(seed, detail::mix_ids(second ? 2 : 1, t)));
        if (!second) {
            const auto r = alg.run(x, w, epsilon, ctx, settings);
            a[t] = scaled_error(r.answers, truth_a, static_cast<double>(x.scale()));
        } else {
            const auto r = alg.run(big, w, epsilon / static_cast<double>(factor), ctx, settings);
            b[t] = scaled_error(r.answers, truth_b, static_cast<double>(big.scale()));
        }
    });
    exchangeability_verdict v;
    v.test = welch_t_test(a, b);
    v.mean_base = summarize(a).mean;
    v.mean_scaled = summarize(b).mean;
    v.passed = v.test.p_value >= alpha;
    return v;
}

struct consistency_verdict {
    bool passed = false;
    bool plateau = false;
    std::vector<double> ladder;
    std::vector<double> mean_errors;
};

inline std::vector<double> default_epsilon_ladder() { return {1.0, 10.0, 100.0, 1e3, 1e4}; }

/// Mean scaled error along an increasing epsilon ladder. Passes when the top rung is at
/// most `floor` and still falling: an error that shrinks by less than half over the last
/// decade (and is above 1e-12) counts as a plateau.
inline consistency_verdict check_consistency(const algorithm_info& alg, const data_vector& x, const workload& w,
                                             const std::vector<double>& ladder, std::size_t trials, double floor,
                                             std::uint64_t seed, const run_settings& settings = {},
                                             std::size_t workers = 1) {
    detail::require(ladder.size() >= 2, "check_consistency: ladder needs at least two rungs");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        detail::require(ladder[i] > ladder[i - 1], "check_consistency: ladder must be increasing");
    detail::require(trials >= 1, "check_consistency: at least one trial is required");
    const auto truth = answer_workload(w, x);
    consistency_verdict v;
    v.ladder = ladder;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        std::vector<double> errs(trials);
        detail::parallel_for(trials, workers, [&](std::size_t t) {
            run_context ctx(rng_stream(seed, detail::mix_ids(k, t)));
            const auto r = alg.run(x, w, ladder[k], ctx, settings);
            errs[t] = scaled_error(r.answers, truth, static_cast<double>(x.scale()));
        });
        v.mean_errors.push_back(summarize(errs).mean);
    }
    const double top = v.mean_errors.back();
    const double prev = v.mean_errors[v.mean_errors.size() - 2];
    v.plateau = top > 1e-12 && top > 0.5 * prev;
    v.passed = top <= floor && !v.plateau;
    return v;
}

struct budget_verdict {
    bool passed = false;
    double requested = 0.0;
    double recorded = 0.0;
    std::vector<budget_ledger::entry> stages;
};

/// Runs once with a ledger attached and checks the recorded stages add up to epsilon.
inline budget_verdict check_budget(const algorithm_info& alg, const data_vector& x, const workload& w, double epsilon,
                                   std::uint64_t seed, const run_settings& settings = {}) {
    budget_ledger ledger;
    run_context ctx(rng_stream(seed, 0x627564676574ULL), &ledger);
    const auto r = alg.run(x, w, epsilon, ctx, settings);
    budget_verdict v;
    v.requested = epsilon;
    v.recorded = ledger.total();
    v.stages = ledger.entries();
    v.passed = ledger.balances(epsilon) && std::abs(r.epsilon_spent - epsilon) <= 1e-12 * std::max(1.0, epsilon);
    return v;
}

} // namespace dpbench
