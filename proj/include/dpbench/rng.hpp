#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dpbench/errors.hpp"

namespace dpbench {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

} // namespace detail

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is fully determined by (seed, stream id); the n-th draw depends only on
/// those two values and n, so results are reproducible across platforms and across
/// any scheduling of trial workers.
class rng_stream {
public:
    rng_stream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    /// An independent stream keyed by this stream's identity and `id`.
    rng_stream substream(std::uint64_t id) const noexcept {
        return rng_stream(seed_, detail::mix_ids(stream_, id));
    }

    std::uint64_t next_u64() noexcept {
        if (buffered_ == 0) refill();
        --buffered_;
        return buffer_[buffered_];
    }

    /// Uniform double in the open interval (0, 1), 53 bits of resolution.
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        detail::require(n > 0, "uniform_index: empty range");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Laplace(0, b) by inverse CDF.
    double laplace(double b) noexcept {
        const double u = uniform();
        return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
    }

    /// Binomial(n, p). Inversion for small means, BTRS rejection otherwise.
    std::int64_t binomial(std::int64_t n, double p);

private:
    void refill() noexcept {
        std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        ++counter_;
        buffer_[0] = (std::uint64_t{ctr[0]} << 32) | ctr[1];
        buffer_[1] = (std::uint64_t{ctr[2]} << 32) | ctr[3];
        buffered_ = 2;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

inline std::int64_t rng_stream::binomial(std::int64_t n, double p) {
    detail::require(n >= 0 && p >= 0.0 && p <= 1.0, "binomial: bad parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);

    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    if (nd * p < 10.0) {
        // Sequential search from k = 0; the mean is small so this terminates quickly.
        const double ratio = p / q;
        double prob = std::exp(nd * std::log1p(-p));
        double u = uniform();
        std::int64_t k = 0;
        while (u > prob && k < n) {
            u -= prob;
            prob *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
            ++k;
            if (prob <= 0.0) break;
        }
        return k;
    }

    // Hormann (1993), "The generation of binomial random variates", algorithm BTRS.
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double vr = 0.92 - 4.2 / b;
    const double m = std::floor((nd + 1.0) * p);
    const double lpq = std::log(p / q);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (k < 0.0 || k > nd) continue;
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq)
            return static_cast<std::int64_t>(k);
    }
}

} // namespace dpbench
