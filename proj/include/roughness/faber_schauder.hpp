#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roughness/path.hpp"

namespace roughness {

// Triangular coefficient array of a piecewise-linear interpolation:
// x0 and slope carry the affine part, theta[m][k] the hat-function weights
// of generation m = 0..depth-1 (2^m entries each).
struct FaberSchauderCoeffs {
    double x0 = 0.0;
    double slope = 0.0;
    std::vector<std::vector<double>> theta;

    int depth() const { return static_cast<int>(theta.size()); }

    static FaberSchauderCoeffs zeros(int depth) {
        FaberSchauderCoeffs c;
        c.theta.resize(depth);
        for (int m = 0; m < depth; ++m)
            c.theta[m].assign(static_cast<std::size_t>(pow2i(m)), 0.0);
        return c;
    }
};

// Coefficients of one generation, read directly off the samples.
// theta_{gen,k} = 2^{gen/2} (2 x((2k+1)/2^{gen+1}) - x(k/2^gen) - x((k+1)/2^gen)).
inline std::vector<double> generation_coeffs(const SampledPath& path, int gen) {
    if (gen < 0 || gen + 1 > path.level)
        throw std::invalid_argument("generation_coeffs: need path.level >= gen + 1");
    const std::int64_t stride = pow2i(path.level - gen);
    const std::int64_t half = stride / 2;
    const double scale = pow2_half(gen);
    std::vector<double> out(static_cast<std::size_t>(pow2i(gen)));
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(out.size()); ++k) {
        const double left = path.values[static_cast<std::size_t>(k * stride)];
        const double mid = path.values[static_cast<std::size_t>(k * stride + half)];
        const double right = path.values[static_cast<std::size_t>((k + 1) * stride)];
        out[static_cast<std::size_t>(k)] = scale * (2.0 * mid - left - right);
    }
    return out;
}

// Full decomposition down to generation path.level - 1.
inline FaberSchauderCoeffs analyze(const SampledPath& path) {
    if (path.level < 1)
        throw std::invalid_argument("analyze: level-0 paths have no interior point");
    FaberSchauderCoeffs c;
    c.x0 = path.values.front();
    c.slope = path.values.back() - path.values.front();
    c.theta.resize(path.level);
    for (int m = 0; m < path.level; ++m) c.theta[m] = generation_coeffs(path, m);
    return c;
}

// Evaluate the interpolation on T_out_level by midpoint refinement:
// each generation adds theta_{m,k} * 2^{-m/2-1} at the new midpoints,
// generations beyond depth() refine linearly. Exact inverse of analyze.
inline SampledPath synthesize(const FaberSchauderCoeffs& coeffs, int out_level,
                              std::string label = {}) {
    if (out_level < coeffs.depth())
        throw std::invalid_argument(
            "synthesize: out_level below coefficient depth would drop generations");
    if (out_level > kMaxPathLevel)
        throw std::invalid_argument("synthesize: out_level exceeds path level cap");
    for (int m = 0; m < coeffs.depth(); ++m)
        if (static_cast<std::int64_t>(coeffs.theta[m].size()) != pow2i(m))
            throw std::invalid_argument("synthesize: generation " + std::to_string(m) +
                                        " has wrong length");

    std::vector<double> cur{coeffs.x0, coeffs.x0 + coeffs.slope};
    for (int m = 0; m < out_level; ++m) {
        std::vector<double> next(static_cast<std::size_t>(pow2i(m + 1)) + 1);
        const double bump = m < coeffs.depth() ? pow2_half(-m - 2) : 0.0;  // 2^{-m/2-1}
        for (std::int64_t k = 0; k < pow2i(m); ++k) {
            const double left = cur[static_cast<std::size_t>(k)];
            const double right = cur[static_cast<std::size_t>(k + 1)];
            next[static_cast<std::size_t>(2 * k)] = left;
            double mid = 0.5 * (left + right);
            if (m < coeffs.depth()) mid += coeffs.theta[m][static_cast<std::size_t>(k)] * bump;
            next[static_cast<std::size_t>(2 * k + 1)] = mid;
        }
        next.back() = cur.back();
        cur = std::move(next);
    }
    return SampledPath(out_level, std::move(cur), std::move(label));
}

// Takagi-Landsberg path: theta_{m,k} = 2^{m(1/2 - r)} for m < depth, no affine
// part. Sampling with depth == out_level reproduces the infinite series at the
// grid points, because every finer hat function vanishes there.
inline SampledPath takagi_landsberg(double r, int depth, int out_level) {
    if (!(r > 0.0) || r > 1.0)
        throw std::invalid_argument("takagi_landsberg: r must lie in (0, 1]");
    if (depth < 0 || out_level < depth)
        throw std::invalid_argument("takagi_landsberg: need 0 <= depth <= out_level");
    FaberSchauderCoeffs c = FaberSchauderCoeffs::zeros(depth);
    for (int m = 0; m < depth; ++m) {
        const double w = std::exp2(m * (0.5 - r));
        for (double& t : c.theta[m]) t = w;
    }
    return synthesize(c, out_level, "takagi_landsberg r=" + std::to_string(r));
}

// Antiderivative of the full (infinite-series) Takagi-Landsberg path on
// T_out_level, computed exactly: generations below out_level integrate via the
// trapezoid rule on the synthesized piecewise-linear truncation (exact for
// piecewise-linear integrands), and generations >= out_level contribute the
// closed-form linear tail t * 2^{-out_level*r - 2} / (1 - 2^{-r}), since each
// of their hat functions lies wholly inside or outside [0, t] at grid points.
inline SampledPath takagi_antiderivative(double r, int out_level) {
    if (!(r > 0.0) || r > 1.0)
        throw std::invalid_argument("takagi_antiderivative: r must lie in (0, 1]");
    if (out_level < 1 || out_level > kMaxPathLevel)
        throw std::invalid_argument("takagi_antiderivative: bad out_level");

    const SampledPath x = takagi_landsberg(r, out_level, out_level);
    const std::size_t count = x.values.size();
    std::vector<double> y(count);
    const double tail_rate = std::exp2(-r * out_level - 2.0) / (1.0 - std::exp2(-r));
    long double acc = 0.0L;
    y[0] = 0.0;
    for (std::size_t j = 1; j < count; ++j) {
        acc += 0.5L * (static_cast<long double>(x.values[j - 1]) + x.values[j]);
        const double t = x.time_at(static_cast<std::int64_t>(j));
        y[j] = static_cast<double>(std::ldexp(acc, -out_level)) + t * tail_rate;
    }
    return SampledPath(out_level, std::move(y), "takagi_antiderivative r=" + std::to_string(r));
}

inline void write_coeffs_csv(const FaberSchauderCoeffs& coeffs, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_coeffs_csv: cannot open " + file);
    out << "m,k,theta\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", coeffs.slope);
    out << "-1,0," << buf << '\n';
    for (int m = 0; m < coeffs.depth(); ++m)
        for (std::size_t k = 0; k < coeffs.theta[m].size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", coeffs.theta[m][k]);
            out << m << ',' << k << ',' << buf << '\n';
        }
    if (!out) throw std::runtime_error("write_coeffs_csv: write failed for " + file);
}

}  // namespace roughness
