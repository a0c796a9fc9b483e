#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roughness/estimators.hpp"
#include "roughness/path.hpp"

namespace roughness {

inline void check_hurst(double hurst, const char* where) {
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::invalid_argument(std::string(where) + ": hurst must lie in (0, 1)");
}

// Covariance kernel components of the z-vectors: g_H = h1 + h2 + h3.
struct GhComponents {
    double h1 = 0.0;
    double h2 = 0.0;
    double h3 = 0.0;
    double total() const { return h1 + h2 + h3; }
};

inline GhComponents g_h_components(std::int64_t lag, double hurst) {
    check_hurst(hurst, "g_h_components");
    if (lag < 0) throw std::invalid_argument("g_h_components: lag must be >= 0");
    const double s = static_cast<double>(lag);
    const double twoH = 2.0 * hurst;
    GhComponents c;
    c.h1 = -2.0 * (2.0 * std::pow(s, twoH) + std::pow(std::fabs(s - 1.0), twoH) +
                   std::pow(s + 1.0, twoH));
    c.h2 = lag == 0 ? 16.0 / (twoH + 1.0)
                    : 8.0 / (twoH + 1.0) *
                          (std::pow(s + 1.0, twoH + 1.0) - std::pow(s - 1.0, twoH + 1.0));
    c.h3 = -8.0 / ((twoH + 2.0) * (twoH + 1.0)) *
           (std::pow(s + 1.0, twoH + 2.0) - 2.0 * std::pow(s, twoH + 2.0) +
            std::pow(std::fabs(s - 1.0), twoH + 2.0));
    return c;
}

namespace detail {

// g_H(lag) for lag >= 3 through the binomial expansion around lag:
// g_H = lag^{2H} * sum_{even j >= 4} binom(2H, j) b_j lag^{-j},
// b_j = -4 + 16/(j+1) - 16/((j+1)(j+2)). All retained terms share one sign,
// so this stays fully accurate where the direct formula cancels to noise.
inline double g_h_series(std::int64_t lag, double hurst) {
    const double s = static_cast<double>(lag);
    const double twoH = 2.0 * hurst;
    double binom = 1.0;     // binom(2H, j), updated along j
    double s_pow = 1.0;     // lag^{-j}
    double acc = 0.0;
    for (int j = 0; j <= 256; ++j) {
        if (j >= 4 && (j & 1) == 0) {
            const double b = -4.0 + 16.0 / (j + 1.0) - 16.0 / ((j + 1.0) * (j + 2.0));
            const double term = binom * b * s_pow;
            acc += term;
            if (std::fabs(term) < 1e-24 * std::fabs(acc)) break;
        }
        binom *= (twoH - j) / (j + 1.0);
        s_pow /= s;
    }
    return std::pow(s, twoH) * acc;
}

}  // namespace detail

// g_H(lag); switches to the series form at lag >= 3 where the direct
// closed form loses all significant digits to cancellation.
inline double g_h(std::int64_t lag, double hurst) {
    if (lag < 0) throw std::invalid_argument("g_h: lag must be >= 0");
    if (lag <= 2) return g_h_components(lag, hurst).total();
    check_hurst(hurst, "g_h");
    return detail::g_h_series(lag, hurst);
}

struct GhTable {
    double hurst = 0.0;
    std::vector<GhComponents> components;  // index = lag
    std::vector<double> values;            // stable totals

    double value(std::int64_t lag) const { return values.at(static_cast<std::size_t>(lag)); }
};

inline GhTable make_gh_table(double hurst, std::int64_t max_lag) {
    GhTable t;
    t.hurst = hurst;
    t.components.reserve(static_cast<std::size_t>(max_lag) + 1);
    t.values.reserve(static_cast<std::size_t>(max_lag) + 1);
    for (std::int64_t lag = 0; lag <= max_lag; ++lag) {
        t.components.push_back(g_h_components(lag, hurst));
        t.values.push_back(g_h(lag, hurst));
    }
    return t;
}

// Closed-form constants of the Gaussian limit theory.
struct AsymptoticConstants {
    double hurst = 0.0;
    double theta_norm_sq_limit = 0.0;  // limit of 2^{(2H-2)n} ||theta_n||^2
    double z_norm_limit = 0.0;         // limit of 2^{n(H-1)} ||z_n||
    double alpha = 0.0;                // g(0) - g(1)/2 - g(2) + g(3)/2
    double beta = 0.0;                 // 2^{2+2H} - 2^{4H}
    double w_norm_limit = 0.0;         // limit of 2^{n(H-1)} ||w_n||
    double ratio = 0.0;                // limit of ||w_n|| / ||theta_n|| = sqrt(alpha/beta)
};

inline AsymptoticConstants asymptotic_constants(double hurst) {
    check_hurst(hurst, "asymptotic_constants");
    AsymptoticConstants c;
    c.hurst = hurst;
    c.theta_norm_sq_limit = std::exp2(2.0 - 2.0 * hurst) - 1.0;
    c.z_norm_limit = 2.0 * std::sqrt((1.0 - hurst) / (hurst + 1.0));
    c.alpha = g_h(0, hurst) - 0.5 * g_h(1, hurst) - g_h(2, hurst) + 0.5 * g_h(3, hurst);
    c.beta = std::exp2(2.0 + 2.0 * hurst) - std::exp2(4.0 * hurst);
    c.w_norm_limit = std::exp2(-2.0 * hurst) * std::sqrt(c.alpha);
    c.ratio = std::sqrt(c.alpha / c.beta);
    return c;
}

// Block application of r = (1/4)(-1, +1, +1, -1): maps a length-4*2^n vector
// to length 2^n without materializing the matrix.
inline std::vector<double> q_apply(std::span<const double> z) {
    if (z.size() % 4 != 0) throw std::invalid_argument("q_apply: length must be a multiple of 4");
    std::vector<double> out(z.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.25 * (-z[4 * i] + z[4 * i + 1] + z[4 * i + 2] - z[4 * i + 3]);
    return out;
}

inline Eigen::MatrixXd q_dense(int n) {
    if (n < 0 || n > 10) throw std::invalid_argument("q_dense: n out of range");
    const std::int64_t rows = pow2i(n);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(rows, 4 * rows);
    for (std::int64_t i = 0; i < rows; ++i) {
        q(i, 4 * i) = -0.25;
        q(i, 4 * i + 1) = 0.25;
        q(i, 4 * i + 2) = 0.25;
        q(i, 4 * i + 3) = -0.25;
    }
    return q;
}

// Dominant eigenvalue of M M^T by power iteration; equals the squared
// operator 2-norm of M.
inline double operator_norm_sq(const Eigen::MatrixXd& m, int iters = 300) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 1e-3 * std::sin(1.0 + static_cast<double>(i));
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd w = m * (m.transpose() * v);
        const double next = v.dot(w);
        w.normalize();
        if (it > 4 && std::fabs(next - lambda) <= 1e-15 * std::fabs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
        v = std::move(w);
    }
    return lambda;
}

// Dense covariance structure of the z-vectors: G_n Toeplitz from g_H,
// Gamma_n = 2^{(1-2H)n} G_n, and Phi_n = Q_n Gamma_{n+2} Q_n^T assembled
// through q_apply on rows and columns.
struct CovarianceMatrices {
    int n = 0;
    double hurst = 0.0;
    Eigen::MatrixXd gram;
    Eigen::MatrixXd gamma;
    Eigen::MatrixXd phi;
};

namespace detail {

inline Eigen::MatrixXd toeplitz_from_gh(std::int64_t size, double hurst, double scale) {
    std::vector<double> g(static_cast<std::size_t>(size));
    for (std::int64_t lag = 0; lag < size; ++lag)
        g[static_cast<std::size_t>(lag)] = g_h(lag, hurst);
    Eigen::MatrixXd out(size, size);
    for (std::int64_t i = 0; i < size; ++i)
        for (std::int64_t j = 0; j < size; ++j)
            out(i, j) = scale * g[static_cast<std::size_t>(std::llabs(i - j))];
    return out;
}

}  // namespace detail

inline CovarianceMatrices gamma_matrix(int n, double hurst) {
    check_hurst(hurst, "gamma_matrix");
    if (n < 0 || n > 8)
        throw std::invalid_argument("gamma_matrix: dense matrices capped at n = 8");
    CovarianceMatrices out;
    out.n = n;
    out.hurst = hurst;
    const std::int64_t size = pow2i(n);
    out.gram = detail::toeplitz_from_gh(size, hurst, 1.0);
    out.gamma = std::exp2((1.0 - 2.0 * hurst) * n) * out.gram;

    const Eigen::MatrixXd big =
        detail::toeplitz_from_gh(4 * size, hurst, std::exp2((1.0 - 2.0 * hurst) * (n + 2)));
    Eigen::MatrixXd half(4 * size, size);  // Gamma_{n+2} Q^T
    std::vector<double> row(static_cast<std::size_t>(4 * size));
    for (std::int64_t i = 0; i < 4 * size; ++i) {
        for (std::int64_t j = 0; j < 4 * size; ++j) row[static_cast<std::size_t>(j)] = big(i, j);
        const std::vector<double> mapped = q_apply(row);
        for (std::int64_t j = 0; j < size; ++j) half(i, j) = mapped[static_cast<std::size_t>(j)];
    }
    out.phi.resize(size, size);
    std::vector<double> col(static_cast<std::size_t>(4 * size));
    for (std::int64_t j = 0; j < size; ++j) {
        for (std::int64_t i = 0; i < 4 * size; ++i) col[static_cast<std::size_t>(i)] = half(i, j);
        const std::vector<double> mapped = q_apply(col);
        for (std::int64_t i = 0; i < size; ++i) out.phi(i, j) = mapped[static_cast<std::size_t>(i)];
    }
    return out;
}

// Coefficients xi of the linear form z^{(n,k)}_i = sum_j xi_j x(j 2^{-n-k-1}):
// zero outside the block [2^{k+1}(i-1), 2^{k+1} i], 2^{n/2}(2^{-k} - 2) at the
// two block endpoints, 2^{1-k+n/2} strictly inside. i is 1-based.
inline std::vector<double> xi_coeffs(int n, int k, std::int64_t i) {
    if (n < 0 || k < 0) throw std::invalid_argument("xi_coeffs: need n, k >= 0");
    if (n + k + 1 > kMaxPathLevel) throw std::invalid_argument("xi_coeffs: grid too fine");
    if (i < 1 || i > pow2i(n)) throw std::invalid_argument("xi_coeffs: need 1 <= i <= 2^n");
    std::vector<double> xi(static_cast<std::size_t>(pow2i(n + k + 1)) + 1, 0.0);
    const std::int64_t lo = pow2i(k + 1) * (i - 1);
    const std::int64_t hi = pow2i(k + 1) * i;
    const double endpoint = pow2_half(n) * (std::ldexp(1.0, -k) - 2.0);
    const double interior = std::ldexp(pow2_half(n), 1 - k);
    xi[static_cast<std::size_t>(lo)] = endpoint;
    xi[static_cast<std::size_t>(hi)] = endpoint;
    for (std::int64_t j = lo + 1; j < hi; ++j) xi[static_cast<std::size_t>(j)] = interior;
    return xi;
}

// Truncation z_{(n,k)} of the z-vector, read off the Faber-Schauder
// coefficients of generations n..n+k.
inline std::vector<double> z_truncated(const SampledPath& x, int n, int k) {
    if (n < 0 || k < 0) throw std::invalid_argument("z_truncated: need n, k >= 0");
    if (x.level < n + k + 1)
        throw std::invalid_argument("z_truncated: need x.level >= n + k + 1");
    std::vector<double> z(static_cast<std::size_t>(pow2i(n)), 0.0);
    for (int m = n; m <= n + k; ++m) {
        const std::vector<double> theta = generation_coeffs(x, m);
        const double scale = pow2_half(3 * (n - m));
        const std::int64_t per_block = pow2i(m - n);
        for (std::int64_t i = 0; i < pow2i(n); ++i) {
            long double block = 0.0L;
            for (std::int64_t j = 0; j < per_block; ++j)
                block += theta[static_cast<std::size_t>(j + per_block * i)];
            z[static_cast<std::size_t>(i)] += scale * static_cast<double>(block);
        }
    }
    return z;
}

// Coefficient-estimation error vartheta_n - theta_n, computed from direct
// observations of the trajectory x and of (an approximation of) its
// antiderivative y. Equals Q_n z_{n+2} up to the truncation error of the
// z-series and the integration error in y.
inline std::vector<double> w_error(const SampledPath& x, const SampledPath& y, int n) {
    const VarthetaVector vartheta = vartheta_coeffs(y, n);
    const std::vector<double> theta = generation_coeffs(x, n);
    std::vector<double> w(vartheta.values.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = vartheta.values[i] - theta[i];
    return w;
}

struct ConditionWRow {
    int n = 0;
    std::int64_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct ConditionWReport {
    std::vector<ConditionWRow> rows;
    std::optional<double> hurst;
    std::optional<double> closed_form_ratio;  // sqrt(alpha/beta) when hurst given
};

// Empirical ||w_n|| / ||theta_n|| across (x, y) sample pairs. Reports, does
// not assert: finite data cannot certify the limit in the ratio condition.
inline ConditionWReport condition_w_diagnostic(
    const std::vector<std::pair<SampledPath, SampledPath>>& samples,
    const std::vector<int>& n_values, std::optional<double> hurst = std::nullopt) {
    if (samples.empty())
        throw std::invalid_argument("condition_w_diagnostic: empty sample set");
    ConditionWReport report;
    report.hurst = hurst;
    if (hurst) report.closed_form_ratio = asymptotic_constants(*hurst).ratio;
    for (int n : n_values) {
        ConditionWRow row;
        row.n = n;
        std::vector<double> ratios;
        ratios.reserve(samples.size());
        for (const auto& [x, y] : samples) {
            const std::vector<double> w = w_error(x, y, n);
            const double theta_norm = l2_norm(generation_coeffs(x, n));
            if (theta_norm == 0.0) continue;  // degenerate pair, excluded
            ratios.push_back(l2_norm(w) / theta_norm);
        }
        row.count = static_cast<std::int64_t>(ratios.size());
        if (!ratios.empty()) {
            double mean = 0.0;
            row.min = ratios.front();
            row.max = ratios.front();
            for (double r : ratios) {
                mean += r;
                row.min = std::min(row.min, r);
                row.max = std::max(row.max, r);
            }
            mean /= static_cast<double>(ratios.size());
            double var = 0.0;
            for (double r : ratios) var += (r - mean) * (r - mean);
            row.mean = mean;
            row.sd = ratios.size() > 1
                         ? std::sqrt(var / static_cast<double>(ratios.size() - 1))
                         : 0.0;
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace roughness
