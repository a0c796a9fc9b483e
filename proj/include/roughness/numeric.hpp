#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>

namespace roughness {

inline constexpr std::int64_t pow2i(int k) {
    return std::int64_t{1} << k;
}

// 2^{m/2} for integer m (possibly negative). Built from an exact power of two
// and a correctly rounded sqrt(2), so even/odd half-powers stay consistent.
inline double pow2_half(int m) {
    const double base = std::ldexp(1.0, m >> 1);  // floor(m/2), also for m < 0
    return (m & 1) ? base * std::numbers::sqrt2 : base;
}

namespace detail {

inline double pairwise_sum_impl(const double* p, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum_impl(p, h) + pairwise_sum_impl(p + h, n - h);
}

inline double pairwise_sumsq_impl(const double* p, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i] * p[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sumsq_impl(p, h) + pairwise_sumsq_impl(p + h, n - h);
}

}  // namespace detail

// Pairwise (tree) summation; keeps accumulated rounding at O(log n) ulps,
// which matters for the large alternating sums in the spline formulas.
inline double pairwise_sum(std::span<const double> xs) {
    return detail::pairwise_sum_impl(xs.data(), xs.size());
}

inline double squared_l2_norm(std::span<const double> xs) {
    return detail::pairwise_sumsq_impl(xs.data(), xs.size());
}

inline double l2_norm(std::span<const double> xs) {
    return std::sqrt(squared_l2_norm(xs));
}

}  // namespace roughness
