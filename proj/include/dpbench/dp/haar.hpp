#pragma once

// Orthonormal discrete Haar wavelet transform.
//
// Coefficient layout for a length-N signal (N a power of two):
//   [0]                 approximation (support N)
//   [1]                 coarsest detail (support N)
//   [2^j, 2^(j+1))      details with support N / 2^j
// Non-power-of-two inputs are zero padded; the inverse truncates back.

#include <bit>
#include <cmath>
#include <span>
#include <vector>

#include "dpbench/errors.hpp"

namespace dpbench {

inline std::size_t next_pow2(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 1)); }

inline std::vector<double> haar_forward(std::span<const double> x) {
    const std::size_t n = next_pow2(x.size());
    std::vector<double> a(n, 0.0);
    std::copy(x.begin(), x.end(), a.begin());
    std::vector<double> out(n, 0.0), tmp(n);
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t len = n; len > 1; len /= 2) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) {
            tmp[i] = (a[2 * i] + a[2 * i + 1]) * r;
            out[half + i] = (a[2 * i] - a[2 * i + 1]) * r;
        }
        std::copy(tmp.begin(), tmp.begin() + half, a.begin());
    }
    out[0] = a[0];
    return out;
}

/// Inverse of haar_forward. `length` truncates the padded signal (0 keeps it whole).
inline std::vector<double> haar_inverse(std::span<const double> coeffs, std::size_t length = 0) {
    const std::size_t n = coeffs.size();
    detail::require(n >= 1 && std::has_single_bit(n), "haar_inverse: coefficient count must be a power of two");
    std::vector<double> a(n, 0.0), tmp(n);
    a[0] = coeffs[0];
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t half = 1; half < n; half *= 2) {
        for (std::size_t i = 0; i < half; ++i) {
            tmp[2 * i] = (a[i] + coeffs[half + i]) * r;
            tmp[2 * i + 1] = (a[i] - coeffs[half + i]) * r;
        }
        std::copy(tmp.begin(), tmp.begin() + 2 * half, a.begin());
    }
    if (length != 0) {
        detail::require(length <= n, "haar_inverse: length exceeds the padded size");
        a.resize(length);
    }
    return a;
}

/// Number of cells each coefficient touches, in haar_forward's layout.
inline std::vector<std::size_t> haar_support_sizes(std::size_t padded) {
    detail::require(std::has_single_bit(padded), "haar_support_sizes: size must be a power of two");
    std::vector<std::size_t> s(padded);
    s[0] = padded;
    for (std::size_t half = 1; half < padded; half *= 2)
        for (std::size_t i = 0; i < half; ++i) s[half + i] = padded / half;
    return s;
}

/// Separable 2D transform of a row-major rows x cols grid, padded to powers of two per axis.
/// Returns the padded coefficient grid (row-major, padded_rows x padded_cols).
inline std::vector<double> haar_forward_2d(std::span<const double> grid, std::size_t rows, std::size_t cols) {
    detail::require(grid.size() == rows * cols, "haar_forward_2d: grid size mismatch");
    const std::size_t pr = next_pow2(rows), pc = next_pow2(cols);
    std::vector<double> g(pr * pc, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) g[r * pc + c] = grid[r * cols + c];
    std::vector<double> line;
    for (std::size_t r = 0; r < pr; ++r) {
        line = haar_forward(std::span<const double>(g.data() + r * pc, pc));
        std::copy(line.begin(), line.end(), g.begin() + static_cast<std::ptrdiff_t>(r * pc));
    }
    std::vector<double> col(pr);
    for (std::size_t c = 0; c < pc; ++c) {
        for (std::size_t r = 0; r < pr; ++r) col[r] = g[r * pc + c];
        line = haar_forward(col);
        for (std::size_t r = 0; r < pr; ++r) g[r * pc + c] = line[r];
    }
    return g;
}

inline std::vector<double> haar_inverse_2d(std::span<const double> coeffs, std::size_t padded_rows,
                                           std::size_t padded_cols, std::size_t rows, std::size_t cols) {
    detail::require(coeffs.size() == padded_rows * padded_cols, "haar_inverse_2d: size mismatch");
    std::vector<double> g(coeffs.begin(), coeffs.end());
    std::vector<double> col(padded_rows), line;
    for (std::size_t c = 0; c < padded_cols; ++c) {
        for (std::size_t r = 0; r < padded_rows; ++r) col[r] = g[r * padded_cols + c];
        line = haar_inverse(col);
        for (std::size_t r = 0; r < padded_rows; ++r) g[r * padded_cols + c] = line[r];
    }
    std::vector<double> out(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        line = haar_inverse(std::span<const double>(g.data() + r * padded_cols, padded_cols));
        for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = line[c];
    }
    return out;
}

} // namespace dpbench
