#pragma once

#include <bit>
#include <cmath>

#include "dpbench/algo/result.hpp"
#include "dpbench/dp/haar.hpp"

namespace dpbench {

/// L1 sensitivity of the unnormalized Haar strategy: product over axes of (1 + log2 n_i),
/// with each axis padded to a power of two.
inline double privelet_sensitivity(const domain& d) {
    double s = 1.0;
    for (auto n : d.axis_sizes()) s *= 1.0 + static_cast<double>(std::countr_zero(next_pow2(n)));
    return s;
}

/// Haar wavelet mechanism. Each orthonormal coefficient with support s gets
/// Laplace(lambda / sqrt(s)) noise, lambda = sensitivity / epsilon, which is the
/// Laplace mechanism applied to the +-1 Haar strategy.
inline mechanism_result privelet_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx) {
    detail::check_run_inputs(x, w, epsilon);
    const double start = ctx.spent();
    const double lambda = privelet_sensitivity(x.dom()) / epsilon;
    const auto cells = x.as_reals();
    std::vector<double> est;
    if (x.dom().dims() == 1) {
        auto coeffs = haar_forward(cells);
        const auto support = haar_support_sizes(coeffs.size());
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            coeffs[j] += ctx.rng().laplace(lambda / std::sqrt(static_cast<double>(support[j])));
        est = haar_inverse(coeffs, cells.size());
    } else {
        const std::size_t rows = x.dom().rows(), cols = x.dom().cols();
        const std::size_t pr = next_pow2(rows), pc = next_pow2(cols);
        auto coeffs = haar_forward_2d(cells, rows, cols);
        const auto sr = haar_support_sizes(pr), sc = haar_support_sizes(pc);
        for (std::size_t r = 0; r < pr; ++r)
            for (std::size_t c = 0; c < pc; ++c)
                coeffs[r * pc + c] += ctx.rng().laplace(lambda / std::sqrt(static_cast<double>(sr[r] * sc[c])));
        est = haar_inverse_2d(coeffs, pr, pc, rows, cols);
    }
    ctx.spend("wavelet coefficients", epsilon);
    return detail::finish(w, x.dom(), std::move(est), ctx.spent() - start);
}

} // namespace dpbench
