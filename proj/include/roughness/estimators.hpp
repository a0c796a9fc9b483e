#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughness/faber_schauder.hpp"
#include "roughness/path.hpp"

namespace roughness {

// Raised when a roughness estimate would take log of a zero coefficient norm.
// Callers running batches are expected to count and exclude these paths.
struct degenerate_input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Robust generation-n coefficient estimates built from five antiderivative
// samples per coefficient, observed on T_{n+2}.
struct VarthetaVector {
    int n = 0;
    std::vector<double> values;
};

// Sum of |increment|^p along the n-th dyadic partition.
inline double p_variation(const SampledPath& x, double p, int n) {
    if (!(p >= 1.0)) throw std::invalid_argument("p_variation: need p >= 1");
    if (n < 0 || n > x.level)
        throw std::invalid_argument("p_variation: need 0 <= n <= path level");
    const std::int64_t stride = pow2i(x.level - n);
    long double acc = 0.0L;
    for (std::int64_t k = 0; k < pow2i(n); ++k) {
        const double inc = x.values[static_cast<std::size_t>((k + 1) * stride)] -
                           x.values[static_cast<std::size_t>(k * stride)];
        acc += std::pow(std::fabs(inc), static_cast<long double>(p));
    }
    return static_cast<double>(acc);
}

// Roughness estimate from direct observations of the trajectory itself:
// 1 - (1/n) log2 ||theta_n||_2 with theta_n the generation-n coefficients.
inline double rhat_star(const SampledPath& x, int n) {
    if (n < 1) throw std::invalid_argument("rhat_star: need n >= 1");
    if (n + 1 > x.level) throw std::invalid_argument("rhat_star: need path level >= n + 1");
    const std::vector<double> theta = generation_coeffs(x, n);
    const double norm = l2_norm(theta);
    if (norm == 0.0)
        throw degenerate_input_error("rhat_star: generation-" + std::to_string(n) +
                                     " coefficients all vanish");
    return 1.0 - std::log2(norm) / n;
}

// vartheta_{n,k} = 2^{3n/2+3} (y(4k h) - 2 y((4k+1) h) + 2 y((4k+3) h) - y((4k+4) h)),
// h = 2^{-n-2}. The stencil sums to zero and kills affine functions.
inline VarthetaVector vartheta_coeffs(const SampledPath& y, int n) {
    if (n < 0) throw std::invalid_argument("vartheta_coeffs: need n >= 0");
    if (y.level < n + 2)
        throw std::invalid_argument("vartheta_coeffs: need observations on T_{n+2}");
    const std::int64_t s = pow2i(y.level - (n + 2));
    const double scale = pow2_half(3 * n + 6);  // 2^{3n/2+3}
    VarthetaVector out;
    out.n = n;
    out.values.resize(static_cast<std::size_t>(pow2i(n)));
    for (std::int64_t k = 0; k < pow2i(n); ++k) {
        const auto at = [&](std::int64_t i) {
            return y.values[static_cast<std::size_t>(i * s)];
        };
        out.values[static_cast<std::size_t>(k)] =
            scale * (at(4 * k) - 2.0 * at(4 * k + 1) + 2.0 * at(4 * k + 3) - at(4 * k + 4));
    }
    return out;
}

// Roughness estimate from discrete observations of the antiderivative.
inline double rhat(const SampledPath& y, int n) {
    if (n < 1) throw std::invalid_argument("rhat: need n >= 1");
    const VarthetaVector v = vartheta_coeffs(y, n);
    const double norm = l2_norm(v.values);
    if (norm == 0.0) throw degenerate_input_error("rhat: vartheta vector is zero");
    return 1.0 - std::log2(norm) / n;
}

// Quadratic-spline-derivative coefficient estimates for generation m <= n,
// from observations of y on T_{n+2}. For m == n this coincides with
// vartheta_coeffs. The alternating sum is tree-summed to control cancellation.
inline std::vector<double> spline_gen_coeffs(const SampledPath& y, int n, int m) {
    if (n < 0 || m < 0 || m > n)
        throw std::invalid_argument("spline_gen_coeffs: need 0 <= m <= n");
    if (y.level < n + 2)
        throw std::invalid_argument("spline_gen_coeffs: need observations on T_{n+2}");
    const std::int64_t s = pow2i(y.level - (n + 2));       // one T_{n+2} step
    const std::int64_t block = pow2i(y.level - m);         // one T_m cell
    const std::int64_t terms = pow2i(n + 1 - m);
    const double scale = pow2_half(2 * n + m + 6);         // 2^{n+m/2+3}
    const auto at = [&](std::int64_t i) { return y.values[static_cast<std::size_t>(i)]; };

    std::vector<double> out(static_cast<std::size_t>(pow2i(m)));
    std::vector<double> buf(static_cast<std::size_t>(terms));
    for (std::int64_t k = 0; k < pow2i(m); ++k) {
        const std::int64_t a = k * block;
        const std::int64_t b = (k + 1) * block;
        for (std::int64_t j = 1; j <= terms; ++j) {
            const double fwd = at(a + j * s) - at(a + (j - 1) * s);
            const double bwd = at(b - (j - 1) * s) - at(b - j * s);
            const double term = fwd + bwd;
            buf[static_cast<std::size_t>(j - 1)] = (j & 1) ? -term : term;
        }
        out[static_cast<std::size_t>(k)] = scale * pairwise_sum(buf);
    }
    return out;
}

// Final-generation (m = n+1) spline coefficients. These carry the additive
// term -2^{(n+1)/2+2} x0_hat, so any error in x0_hat is amplified by
// 2^{(n+1)/2+2} in every entry; rtilde below exists to demonstrate that.
// The alternating prefix sum is empty for k = 0.
inline std::vector<double> spline_final_gen_coeffs(const SampledPath& y, int n, double x0_hat) {
    if (n < 0) throw std::invalid_argument("spline_final_gen_coeffs: need n >= 0");
    if (y.level < n + 2)
        throw std::invalid_argument("spline_final_gen_coeffs: need observations on T_{n+2}");
    const std::int64_t s = pow2i(y.level - (n + 2));
    const auto at = [&](std::int64_t i) { return y.values[static_cast<std::size_t>(i * s)]; };
    const double c_x0 = pow2_half(n + 5);     // 2^{(n+1)/2+2}
    const double c_pre = pow2_half(3 * n + 11);  // 2^{3(n+1)/2+4}
    const double c_loc = pow2_half(3 * n + 7);   // 2^{3(n+1)/2+2}

    std::vector<double> out(static_cast<std::size_t>(pow2i(n + 1)));
    long double prefix = 0.0L;  // sum_{j=1}^{2k} (-1)^j (y(j h) - y((j-1) h))
    for (std::int64_t k = 0; k < pow2i(n + 1); ++k) {
        if (k >= 1) prefix += at(2 * k) - 2.0L * at(2 * k - 1) + at(2 * k - 2);
        out[static_cast<std::size_t>(k)] =
            -c_x0 * x0_hat - c_pre * static_cast<double>(prefix) +
            3.0 * c_loc * (at(2 * k + 1) - at(2 * k)) - c_loc * (at(2 * k + 2) - at(2 * k + 1));
    }
    return out;
}

// Deliberately fragile estimator built on the final spline generation only;
// kept for comparison against rhat, which discards that generation.
inline double rtilde(const SampledPath& y, int n, double x0_hat) {
    const std::vector<double> coeffs = spline_final_gen_coeffs(y, n, x0_hat);
    const double norm = l2_norm(coeffs);
    if (norm == 0.0) throw degenerate_input_error("rtilde: final-generation vector is zero");
    return 1.0 - std::log2(norm) / (n + 1);
}

}  // namespace roughness
