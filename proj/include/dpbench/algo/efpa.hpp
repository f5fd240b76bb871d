#pragma once

// EFPA: keep the k lowest-frequency real Fourier coefficients, with k picked privately.

#include <cmath>
#include <vector>

#include "dpbench/algo/result.hpp"
#include "dpbench/dp/exponential.hpp"
#include "dpbench/dp/fourier.hpp"

namespace dpbench {

/// L1 sensitivity of the first k orthonormal real Fourier coefficients.
inline double efpa_sensitivity(std::size_t k, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += real_fourier_basis_max(j, n);
    return s;
}

/// Score of every k in [1, n] (index k-1): minus the L2 norm of the dropped tail plus
/// the expected L2 norm of the noise on the kept coefficients at budget `measure_eps`.
/// The tail norm has sensitivity 1; the noise term does not depend on the data.
inline std::vector<double> efpa_scores(std::span<const double> coeffs, double measure_eps) {
    const std::size_t n = coeffs.size();
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) tail[j] = tail[j + 1] + coeffs[j] * coeffs[j];
    std::vector<double> scores(n);
    double sens = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        sens += real_fourier_basis_max(k - 1, n);
        const double noise = std::sqrt(2.0 * static_cast<double>(k)) * sens / measure_eps;
        scores[k - 1] = -(std::sqrt(tail[k]) + noise);
    }
    return scores;
}

/// Chooses k with epsilon/2 and measures the kept coefficients with epsilon/2.
inline mechanism_result efpa_run(const data_vector& x, const workload& w, double epsilon, run_context& ctx) {
    detail::check_run_inputs(x, w, epsilon);
    detail::require(x.dom().dims() == 1, "efpa: 1D data required");
    const double start = ctx.spent();
    const std::size_t n = x.size();
    const double select_eps = epsilon / 2.0;
    const double measure_eps = epsilon - select_eps;
    const auto values = x.as_reals();
    auto coeffs = real_fourier_forward(values);
    const auto scores = efpa_scores(coeffs, measure_eps);
    const std::size_t k = exponential_mechanism(scores, select_eps, 1.0, ctx.rng()) + 1;
    ctx.spend("choose k", select_eps);
    const double b = efpa_sensitivity(k, n) / measure_eps;
    for (std::size_t j = 0; j < n; ++j) coeffs[j] = j < k ? coeffs[j] + ctx.rng().laplace(b) : 0.0;
    ctx.spend("coefficients", measure_eps);
    return detail::finish(w, x.dom(), real_fourier_inverse(coeffs), ctx.spent() - start);
}

} // namespace dpbench
