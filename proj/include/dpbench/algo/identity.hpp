#pragma once

#include "dpbench/algo/result.hpp"
#include "dpbench/dp/laplace.hpp"

namespace dpbench {

/// Laplace(1/epsilon) on every cell.
inline mechanism_result identity_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx) {
    detail::check_run_inputs(x, w, epsilon);
    const double start = ctx.spent();
    auto cells = x.as_reals();
    const auto noise = laplace_vector(1.0, epsilon, cells.size(), ctx.rng());
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += noise[i];
    ctx.spend("cells", epsilon);
    return detail::finish(w, x.dom(), std::move(cells), ctx.spent() - start);
}

} // namespace dpbench
