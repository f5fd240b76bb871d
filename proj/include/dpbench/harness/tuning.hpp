#pragma once

// Learning free parameters on synthetic training shapes.

#include <functional>
#include <limits>
#include <vector>

#include "dpbench/datagen/datagen.hpp"
#include "dpbench/harness/metrics.hpp"
#include "dpbench/harness/param_table.hpp"
#include "dpbench/harness/registry.hpp"
#include "dpbench/harness/trials.hpp"

namespace dpbench {

/// Builds a runnable algorithm from a candidate parameter vector.
using parameterized_algorithm = std::function<mechanism_result(const std::vector<double>& theta, const data_vector&,
                                                               const workload&, double, run_context&)>;

struct tuning_plan {
    std::vector<std::string> param_names;
    std::vector<std::vector<double>> grid;  ///< candidate parameter vectors
    std::vector<shape_kind> training_kinds; ///< synthetic shapes only
    std::size_t shapes_per_kind = 2;
    std::vector<double> products;           ///< epsilon * scale values to tune at
    double epsilon = 1.0;                   ///< scale = product / epsilon
    domain dom = domain::one_d(256);
    std::function<workload(const domain&)> make_workload = [](const domain& d) {
        return d.dims() == 1 ? make_prefix_workload(d) : make_random_range_workload(d, 2000, 1);
    };
    std::size_t trials = 5;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// For every product, the grid point with the lowest mean scaled error over freshly
/// drawn training shapes (ties keep the earlier grid point).
inline param_table tune_params(const parameterized_algorithm& alg, const tuning_plan& plan) {
    detail::require(!plan.grid.empty(), "tune_params: empty parameter grid");
    detail::require(!plan.training_kinds.empty() && plan.shapes_per_kind >= 1, "tune_params: no training shapes");
    detail::require(!plan.products.empty(), "tune_params: no epsilon * scale products");
    for (const auto& theta : plan.grid)
        detail::require(theta.size() == plan.param_names.size(), "tune_params: grid point has the wrong length");
    const workload w = plan.make_workload(plan.dom);

    param_table table(plan.param_names);
    for (std::size_t pi = 0; pi < plan.products.size(); ++pi) {
        const double product = plan.products[pi];
        const auto scale = static_cast<std::int64_t>(std::llround(product / plan.epsilon));
        detail::require(scale >= 1, "tune_params: product / epsilon must be at least 1");
        // Training vectors for this product.
        std::vector<data_vector> data;
        rng_stream shapes_rng(plan.seed, detail::mix_ids(0x747261696eULL, pi));
        for (auto kind : plan.training_kinds)
            for (std::size_t s = 0; s < plan.shapes_per_kind; ++s) {
                const auto p = synth_shape(kind, plan.dom, {}, shapes_rng);
                data.push_back(sample_multinomial(p, scale, shapes_rng));
            }
        std::vector<std::vector<double>> truths;
        for (const auto& x : data) truths.push_back(answer_workload(w, x));

        std::size_t best = 0;
        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < plan.grid.size(); ++g) {
            const std::size_t jobs = data.size() * plan.trials;
            std::vector<double> errs(jobs);
            detail::parallel_for(jobs, plan.workers, [&](std::size_t i) {
                const std::size_t d = i / plan.trials, t = i % plan.trials;
                run_context ctx(rng_stream(plan.seed, detail::mix_ids(detail::mix_ids(pi, d), t)));
                const auto r = alg(plan.grid[g], data[d], w, plan.epsilon, ctx);
                errs[i] = scaled_error(r.answers, truths[d], static_cast<double>(data[d].scale()));
            });
            const double m = summarize(errs).mean;
            if (m < best_err) {
                best_err = m;
                best = g;
            }
        }
        table.set(param_table::bucket_of(product), plan.dom.cells(), plan.grid[best]);
    }
    return table;
}

/// MWEM as run by mwem_star: a noisy scale first, then `theta[0]` rounds.
inline parameterized_algorithm mwem_star_candidate(double rho_total = 0.05) {
    return [rho_total](const std::vector<double>& theta, const data_vector& x, const workload& w, double e,
                       run_context& c) {
        const auto side = estimate_scale_side(x, e, rho_total, c);
        mwem_options o;
        o.rounds = static_cast<std::size_t>(std::max(1.0, std::round(theta.at(0))));
        o.assumed_scale = side.scale;
        return mwem_run(x, w, side.remaining_epsilon, c, o);
    };
}

/// AHP as run by ahp_star: a noisy scale first, then (rho, eta) = theta.
inline parameterized_algorithm ahp_star_candidate(double rho_total = 0.05) {
    return [rho_total](const std::vector<double>& theta, const data_vector& x, const workload& w, double e,
                       run_context& c) {
        const auto side = estimate_scale_side(x, e, rho_total, c);
        return ahp_run(x, w, side.remaining_epsilon, c, {theta.at(0), theta.at(1)});
    };
}

inline std::vector<std::vector<double>> mwem_rounds_grid() {
    std::vector<std::vector<double>> g;
    for (double t : {1, 2, 3, 4, 6, 8, 10, 15, 20, 30, 50, 75, 100, 150, 200}) g.push_back({t});
    return g;
}

inline std::vector<std::vector<double>> ahp_grid() {
    std::vector<std::vector<double>> g;
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double eta : {0.0, 0.35, 1.0, 2.0, 5.0}) g.push_back({rho, eta});
    return g;
}

} // namespace dpbench
