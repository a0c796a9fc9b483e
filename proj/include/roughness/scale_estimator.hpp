#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughness/estimators.hpp"

namespace roughness {

// Window and weights of the sequential scale estimator.
struct ScaleConfig {
    int m = 3;
    std::vector<double> alpha{1.0, 1.0, 1.0, 1.0};

    void validate() const {
        if (m < 1) throw std::invalid_argument("ScaleConfig: need m >= 1");
        if (static_cast<int>(alpha.size()) != m + 1)
            throw std::invalid_argument("ScaleConfig: need m + 1 weights");
        for (double a : alpha)
            if (!(a >= 0.0)) throw std::invalid_argument("ScaleConfig: weights must be >= 0");
        if (!(alpha[0] > 0.0)) throw std::invalid_argument("ScaleConfig: need alpha_0 > 0");
    }
};

struct ScaleResult {
    double lambda_s = 1.0;              // optimal scaling factor
    double r_s = 0.0;                   // estimate at the optimal scale
    double c_s = 0.0;                   // normalizer sum alpha_{n-k} / (k(k-1))^2
    std::vector<double> rhat_series;    // rhat_{n-m-1} .. rhat_n of the unscaled input
    std::vector<double> beta;           // weights beta_{n,n-m-1} .. beta_{n,n}
};

namespace detail {

struct SeqScaleQuadratic {
    double u_star;  // minimizer of the convex quadratic in u = log2(lambda)
    double c_s;
};

// Scaling y by lambda shifts rhat_k by -log2|lambda|/k, so the objective
// sum alpha_{n-k} (rhat_k(lambda y) - rhat_{k-1}(lambda y))^2 becomes
// sum alpha_{n-k} (d_k + u/(k(k-1)))^2 in u = log2(lambda): strictly convex,
// with the unique minimizer below.
inline SeqScaleQuadratic seq_scale_quadratic(std::span<const double> series, int n,
                                             const ScaleConfig& cfg) {
    cfg.validate();
    if (n <= cfg.m + 1) throw std::invalid_argument("seq_scale: need n > m + 1");
    if (static_cast<int>(series.size()) != cfg.m + 2)
        throw std::invalid_argument("seq_scale: series must hold rhat_{n-m-1}..rhat_n");
    double num = 0.0, den = 0.0;
    for (int k = n - cfg.m; k <= n; ++k) {
        const double a = cfg.alpha[static_cast<std::size_t>(n - k)];
        const double d = series[static_cast<std::size_t>(k - (n - cfg.m - 1))] -
                         series[static_cast<std::size_t>(k - 1 - (n - cfg.m - 1))];
        const double kk = static_cast<double>(k) * (k - 1);
        num += a * d / kk;
        den += a / (kk * kk);
    }
    return {-num / den, den};
}

}  // namespace detail

// beta_{n,k} for k = n-m-1..n, normalized by c_s = sum alpha_{n-k}/(k(k-1))^2.
// The combination sums to 1, and sum beta_k / k = 0 makes the estimator
// scale-invariant.
inline std::vector<double> beta_weights(int n, const ScaleConfig& cfg) {
    cfg.validate();
    if (n <= cfg.m + 1) throw std::invalid_argument("beta_weights: need n > m + 1");
    double c_s = 0.0;
    for (int k = n - cfg.m; k <= n; ++k) {
        const double kk = static_cast<double>(k) * (k - 1);
        c_s += cfg.alpha[static_cast<std::size_t>(n - k)] / (kk * kk);
    }
    std::vector<double> beta(static_cast<std::size_t>(cfg.m) + 2);
    const auto slot = [&](int k) -> double& {
        return beta[static_cast<std::size_t>(k - (n - cfg.m - 1))];
    };
    slot(n) = 1.0 + cfg.alpha[0] / (c_s * n * n * (n - 1.0));
    for (int k = n - cfg.m; k <= n - 1; ++k)
        slot(k) = (cfg.alpha[static_cast<std::size_t>(n - k)] / (k - 1.0) -
                   cfg.alpha[static_cast<std::size_t>(n - k - 1)] / (k + 1.0)) /
                  (c_s * n * k);
    slot(n - cfg.m - 1) =
        -cfg.alpha[static_cast<std::size_t>(cfg.m)] /
        (c_s * n * (n - cfg.m) * (n - cfg.m - 1.0));
    return beta;
}

// Estimate from an already computed series rhat_{n-m-1}..rhat_n.
inline double seq_scale_from_series(std::span<const double> series, int n,
                                    const ScaleConfig& cfg) {
    const auto q = detail::seq_scale_quadratic(series, n, cfg);
    return series.back() - q.u_star / n;
}

inline ScaleResult seq_scale_estimate(const SampledPath& y, int n, const ScaleConfig& cfg) {
    cfg.validate();
    if (n <= cfg.m + 1) throw std::invalid_argument("seq_scale_estimate: need n > m + 1");
    if (y.level < n + 2)
        throw std::invalid_argument("seq_scale_estimate: need observations on T_{n+2}");
    ScaleResult res;
    res.rhat_series.reserve(static_cast<std::size_t>(cfg.m) + 2);
    for (int k = n - cfg.m - 1; k <= n; ++k) res.rhat_series.push_back(rhat(y, k));
    const auto q = detail::seq_scale_quadratic(res.rhat_series, n, cfg);
    res.c_s = q.c_s;
    res.lambda_s = std::exp2(q.u_star);
    res.r_s = res.rhat_series.back() - q.u_star / n;
    res.beta = beta_weights(n, cfg);
    return res;
}

inline double seq_scale_factor(const SampledPath& y, int n, const ScaleConfig& cfg) {
    return seq_scale_estimate(y, n, cfg).lambda_s;
}

}  // namespace roughness
