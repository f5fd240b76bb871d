#pragma once

#include "dpbench/algo/result.hpp"

namespace dpbench {

/// Noisy total spread evenly over every cell.
inline mechanism_result uniform_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx) {
    detail::check_run_inputs(x, w, epsilon);
    const double start = ctx.spent();
    const double total = static_cast<double>(x.scale()) + ctx.rng().laplace(1.0 / epsilon);
    ctx.spend("total", epsilon);
    std::vector<double> cells(x.size(), total / static_cast<double>(x.size()));
    return detail::finish(w, x.dom(), std::move(cells), ctx.spent() - start);
}

} // namespace dpbench
