#pragma once

// Real orthonormal Fourier basis.
//
// For a length-n signal the coefficient vector is ordered by frequency:
//   c[0]          DC
//   c[2j-1], c[2j] cosine and sine parts of frequency j (1 <= j < n/2)
//   c[n-1]        Nyquist term (even n only)
// Every basis vector has unit norm, so Parseval holds exactly: |x|^2 = |c|^2.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "dpbench/errors.hpp"

namespace dpbench {

namespace detail {

using cplx = std::complex<double>;

/// In-place DFT with sign -1 (forward) or +1 (inverse), unnormalized.
inline void dft_inplace(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!std::has_single_bit(n)) {
        std::vector<cplx> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
                acc += a[t] * cplx(std::cos(ang), std::sin(ang));
            }
            out[k] = acc;
        }
        a.swap(out);
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx w(std::cos(ang * static_cast<double>(k)), std::sin(ang * static_cast<double>(k)));
                const cplx u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace detail

inline std::vector<double> real_fourier_forward(std::span<const double> x) {
    const std::size_t n = x.size();
    detail::require(n >= 1, "real_fourier_forward: empty signal");
    std::vector<detail::cplx> f(x.begin(), x.end());
    detail::dft_inplace(f, -1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> c(n);
    c[0] = f[0].real() * norm;
    for (std::size_t j = 1; 2 * j < n; ++j) {
        c[2 * j - 1] = std::sqrt(2.0) * f[j].real() * norm;
        c[2 * j] = -std::sqrt(2.0) * f[j].imag() * norm;
    }
    if (n % 2 == 0 && n > 1) c[n - 1] = f[n / 2].real() * norm;
    return c;
}

inline std::vector<double> real_fourier_inverse(std::span<const double> c) {
    const std::size_t n = c.size();
    detail::require(n >= 1, "real_fourier_inverse: empty coefficient vector");
    std::vector<detail::cplx> f(n, 0.0);
    f[0] = c[0];
    for (std::size_t j = 1; 2 * j < n; ++j) {
        f[j] = detail::cplx(c[2 * j - 1], -c[2 * j]) / std::sqrt(2.0);
        f[n - j] = std::conj(f[j]);
    }
    if (n % 2 == 0 && n > 1) f[n / 2] = c[n - 1];
    detail::dft_inplace(f, +1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = f[t].real() * norm;
    return x;
}

/// Largest absolute entry of basis vector `index` for length `n`.
inline double real_fourier_basis_max(std::size_t index, std::size_t n) {
    const bool nyquist = n % 2 == 0 && index == n - 1;
    return (index == 0 || nyquist) ? 1.0 / std::sqrt(static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
}

/// A sparse set of retained real-Fourier coefficients.
struct fourier_coefficients {
    std::size_t length = 0;
    std::vector<std::size_t> indices;
    std::vector<double> values;
};

/// Keeps the k largest-magnitude coefficients; equal magnitudes keep the lower index.
inline fourier_coefficients dft_topk(std::span<const double> x, std::size_t k) {
    detail::require(k >= 1 && k <= x.size(), "dft_topk: k must lie in [1, n]");
    const auto c = real_fourier_forward(x);
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(c[a]) > std::abs(c[b]); });
    order.resize(k);
    std::sort(order.begin(), order.end());
    fourier_coefficients out{x.size(), order, {}};
    for (auto i : order) out.values.push_back(c[i]);
    return out;
}

inline std::vector<double> reconstruct(const fourier_coefficients& coeffs) {
    std::vector<double> full(coeffs.length, 0.0);
    for (std::size_t i = 0; i < coeffs.indices.size(); ++i) full.at(coeffs.indices[i]) = coeffs.values[i];
    return real_fourier_inverse(full);
}

} // namespace dpbench
