#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roughness/fft.hpp"
#include "roughness/path.hpp"
#include "roughness/rng.hpp"

namespace roughness {

// Raised when the circulant embedding of the increment covariance has a
// negative eigenvalue beyond rounding tolerance (does not occur for
// fractional Gaussian noise in practice; kept as a documented guard).
struct embedding_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FbmMethod {
    auto_select,  // circulant embedding, Cholesky fallback at small levels
    circulant,
    cholesky,
};

struct FbmSpec {
    double hurst = 0.5;
    int level = 10;
    std::uint64_t seed = 0;
    FbmMethod method = FbmMethod::auto_select;
    int level_guard = 22;  // desk-scale cap on 2^level grid points
};

struct FouSpec {
    double hurst = 0.5;
    double x0 = 0.0;
    double rho = 0.0;
    double mu = 0.0;
    int level = 10;
    std::uint64_t seed = 0;
    int level_guard = 22;
};

enum class TransformKind { identity, exp2, affine, power };

// Strictly monotone C^2 map applied pointwise to a latent path.
struct TransformSpec {
    TransformKind kind = TransformKind::identity;
    double a = 1.0;  // affine: a*x + b
    double b = 0.0;
    double p = 1.0;  // power: x^p

    void validate() const {
        if (kind == TransformKind::affine && a == 0.0)
            throw std::invalid_argument("TransformSpec: affine slope must be nonzero");
        if (kind == TransformKind::power && p == 0.0)
            throw std::invalid_argument("TransformSpec: power exponent must be nonzero");
    }
};

enum class IntegrationRule {
    right_endpoint,  // matches the simulation-study recipe
    trapezoid,       // for sensitivity studies; exact on piecewise-linear input
};

namespace detail {

// Covariance of unit-spacing fractional Gaussian noise at lags 0..count-1.
inline std::vector<double> fgn_covariance(double hurst, std::int64_t count) {
    std::vector<double> c(static_cast<std::size_t>(count));
    const double twoH = 2.0 * hurst;
    for (std::int64_t k = 0; k < count; ++k) {
        const double s = static_cast<double>(k);
        c[static_cast<std::size_t>(k)] =
            0.5 * (std::pow(s + 1.0, twoH) - 2.0 * std::pow(s, twoH) +
                   std::pow(std::fabs(s - 1.0), twoH));
    }
    return c;
}

// sqrt of the circulant-embedding eigenvalues for fGn at the given level,
// cached per (hurst, level). Eigenvalues are checked for nonnegativity;
// tiny negatives from rounding are clamped.
inline std::shared_ptr<const std::vector<double>> fgn_embedding_sqrt_eigs(double hurst,
                                                                          int level) {
    static std::mutex mutex;
    static std::map<std::pair<double, int>, std::shared_ptr<const std::vector<double>>> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find({hurst, level});
        if (it != cache.end()) return it->second;
    }

    const std::int64_t m = pow2i(level);
    const std::int64_t n = 2 * m;
    const std::vector<double> cov = fgn_covariance(hurst, m + 1);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j <= m; ++j) buf[static_cast<std::size_t>(j)] = cov[static_cast<std::size_t>(j)];
    for (std::int64_t j = m + 1; j < n; ++j)
        buf[static_cast<std::size_t>(j)] = cov[static_cast<std::size_t>(n - j)];

    ComplexFft fft(static_cast<std::size_t>(n));
    fft.transform(buf.data());

    double max_eig = 0.0;
    for (const auto& z : buf) max_eig = std::max(max_eig, z.real());
    auto eigs = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
    const double tol = 1e-10 * max_eig;
    for (std::int64_t j = 0; j < n; ++j) {
        double lambda = buf[static_cast<std::size_t>(j)].real();
        if (lambda < 0.0) {
            if (lambda < -tol)
                throw embedding_error("fgn embedding eigenvalue " + std::to_string(lambda) +
                                      " at index " + std::to_string(j) + " is negative");
            lambda = 0.0;
        }
        (*eigs)[static_cast<std::size_t>(j)] = std::sqrt(lambda);
    }

    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.emplace(std::make_pair(hurst, level),
                                        std::shared_ptr<const std::vector<double>>(eigs));
    return it->second;
}

// Unit-spacing fGn of length 2^level via circulant embedding. Consumes
// 2 * 2^level normals in a fixed order, so the draw is seed-deterministic.
inline std::vector<double> fgn_sample_circulant(double hurst, int level, NormalSampler& normal) {
    const std::int64_t m = pow2i(level);
    const std::int64_t n = 2 * m;
    const auto sqrt_eigs = fgn_embedding_sqrt_eigs(hurst, level);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
    const double inv_sqrt2 = std::sqrt(0.5);
    buf[0] = (*sqrt_eigs)[0] * normal();
    for (std::int64_t j = 1; j < m; ++j) {
        const double u = normal();
        const double v = normal();
        const std::complex<double> eps(u * inv_sqrt2, v * inv_sqrt2);
        buf[static_cast<std::size_t>(j)] = (*sqrt_eigs)[static_cast<std::size_t>(j)] * eps;
        buf[static_cast<std::size_t>(n - j)] =
            (*sqrt_eigs)[static_cast<std::size_t>(n - j)] * std::conj(eps);
    }
    buf[static_cast<std::size_t>(m)] = (*sqrt_eigs)[static_cast<std::size_t>(m)] * normal();

    thread_local std::map<std::size_t, std::unique_ptr<ComplexFft>> plans;
    auto& plan = plans[static_cast<std::size_t>(n)];
    if (!plan) plan = std::make_unique<ComplexFft>(static_cast<std::size_t>(n));
    plan->transform(buf.data());

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> out(static_cast<std::size_t>(m));
    for (std::int64_t j = 0; j < m; ++j)
        out[static_cast<std::size_t>(j)] = buf[static_cast<std::size_t>(j)].real() * scale;
    return out;
}

// Direct factorization of the fGn covariance; validation route for small
// levels (the dense matrix has 2^{2 level} entries).
inline std::vector<double> fgn_sample_cholesky(double hurst, int level, NormalSampler& normal) {
    if (level > 12)
        throw std::invalid_argument("fgn_sample_cholesky: dense factorization capped at level 12");
    const std::int64_t m = pow2i(level);
    const std::vector<double> cov = fgn_covariance(hurst, m);
    Eigen::MatrixXd sigma(m, m);
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < m; ++j)
            sigma(i, j) = cov[static_cast<std::size_t>(std::llabs(i - j))];
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("fgn_sample_cholesky: covariance not positive definite");
    Eigen::VectorXd z(m);
    for (std::int64_t i = 0; i < m; ++i) z(i) = normal();
    const Eigen::VectorXd g = llt.matrixL() * z;
    return std::vector<double>(g.data(), g.data() + m);
}

}  // namespace detail

// Fractional Brownian motion with the exact joint law on T_level: increments
// are fGn with variance 2^{-2 H level}, W(0) = 0. Identical seed, identical
// path.
inline SampledPath fbm_sample(const FbmSpec& spec) {
    if (!(spec.hurst > 0.0) || !(spec.hurst < 1.0))
        throw std::invalid_argument("fbm_sample: hurst must lie in (0, 1)");
    if (spec.level < 0 || spec.level > spec.level_guard || spec.level > kMaxPathLevel)
        throw std::invalid_argument("fbm_sample: level " + std::to_string(spec.level) +
                                    " outside guard");

    NormalSampler normal(spec.seed);
    std::vector<double> fgn;
    switch (spec.method) {
        case FbmMethod::circulant:
            fgn = detail::fgn_sample_circulant(spec.hurst, spec.level, normal);
            break;
        case FbmMethod::cholesky:
            fgn = detail::fgn_sample_cholesky(spec.hurst, spec.level, normal);
            break;
        case FbmMethod::auto_select:
            try {
                fgn = detail::fgn_sample_circulant(spec.hurst, spec.level, normal);
            } catch (const embedding_error&) {
                if (spec.level > 12) throw;
                NormalSampler fresh(spec.seed);
                fgn = detail::fgn_sample_cholesky(spec.hurst, spec.level, fresh);
            }
            break;
    }

    const double scale = std::exp2(-spec.hurst * spec.level);  // self-similarity
    std::vector<double> values(fgn.size() + 1);
    values[0] = 0.0;
    long double acc = 0.0L;
    for (std::size_t j = 0; j < fgn.size(); ++j) {
        acc += fgn[j];
        values[j + 1] = static_cast<double>(acc) * scale;
    }
    return SampledPath(spec.level, std::move(values),
                       "fbm H=" + std::to_string(spec.hurst));
}

// Explicit Euler scheme for X_t = x0 + rho * int (mu - X_s) ds + W^H_t,
// driven by one fbm_sample on the same grid. rho == 0 reduces to x0 + W^H
// exactly.
inline SampledPath fou_euler(const FouSpec& spec) {
    FbmSpec fspec;
    fspec.hurst = spec.hurst;
    fspec.level = spec.level;
    fspec.seed = spec.seed;
    fspec.level_guard = spec.level_guard;
    SampledPath w = fbm_sample(fspec);

    std::vector<double> values(w.values.size());
    if (spec.rho == 0.0) {
        for (std::size_t j = 0; j < values.size(); ++j) values[j] = spec.x0 + w.values[j];
    } else {
        const double dt = std::ldexp(1.0, -spec.level);
        values[0] = spec.x0;
        for (std::size_t j = 1; j < values.size(); ++j)
            values[j] = values[j - 1] + spec.rho * (spec.mu - values[j - 1]) * dt +
                        (w.values[j] - w.values[j - 1]);
    }
    return SampledPath(spec.level, std::move(values),
                       "fou H=" + std::to_string(spec.hurst));
}

inline SampledPath apply_transform(const SampledPath& x, const TransformSpec& t) {
    t.validate();
    if (t.kind == TransformKind::identity) return x;
    std::vector<double> values(x.values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        double v = 0.0;
        switch (t.kind) {
            case TransformKind::identity: v = x.values[j]; break;
            case TransformKind::exp2: v = std::exp(2.0 * x.values[j]); break;
            case TransformKind::affine: v = t.a * x.values[j] + t.b; break;
            case TransformKind::power: v = std::pow(x.values[j], t.p); break;
        }
        if (!std::isfinite(v))
            throw std::runtime_error("apply_transform: non-finite value at index " +
                                     std::to_string(j));
        values[j] = v;
    }
    return SampledPath(x.level, std::move(values), x.label);
}

// Riemann-sum antiderivative of the fine samples, reported on T_out_level:
// Y(j 2^-out_level) = 2^-x.level * sum_{i=1}^{j 2^{x.level-out_level}} x(i 2^-x.level)
// for the right-endpoint rule; Y(0) = 0.
inline SampledPath riemann_antiderivative(const SampledPath& x, int out_level,
                                          IntegrationRule rule = IntegrationRule::right_endpoint) {
    if (out_level < 0 || out_level > x.level)
        throw std::invalid_argument("riemann_antiderivative: need 0 <= out_level <= x.level");
    const std::int64_t stride = pow2i(x.level - out_level);
    std::vector<double> out(static_cast<std::size_t>(pow2i(out_level)) + 1);
    out[0] = 0.0;
    long double acc = 0.0L;
    std::int64_t next_stop = stride;
    std::size_t slot = 1;
    for (std::int64_t i = 1; i <= x.last_index(); ++i) {
        if (rule == IntegrationRule::right_endpoint)
            acc += x.values[static_cast<std::size_t>(i)];
        else
            acc += 0.5L * (static_cast<long double>(x.values[static_cast<std::size_t>(i - 1)]) +
                           x.values[static_cast<std::size_t>(i)]);
        if (i == next_stop) {
            out[slot++] = static_cast<double>(std::ldexp(acc, -x.level));
            next_stop += stride;
        }
    }
    return SampledPath(out_level, std::move(out), x.label);
}

}  // namespace roughness
