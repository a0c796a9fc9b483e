#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "roughness/estimators.hpp"
#include "roughness/generators.hpp"
#include "roughness/rng.hpp"

#include "test_util.hpp"

using namespace roughness;

namespace {

double mean_of(const std::vector<double>& xs) {
    long double acc = 0.0L;
    for (double x : xs) acc += x;
    return static_cast<double>(acc / static_cast<long double>(xs.size()));
}

double sd_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    long double acc = 0.0L;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(static_cast<double>(acc / static_cast<long double>(xs.size() - 1)));
}

}  // namespace

TEST_CASE("fbm sampling is seed-deterministic") {
    FbmSpec spec;
    spec.hurst = 0.3;
    spec.level = 10;
    spec.seed = 42;
    const SampledPath a = fbm_sample(spec);
    const SampledPath b = fbm_sample(spec);
    CHECK(a.values == b.values);
    spec.seed = 43;
    CHECK(fbm_sample(spec).values != a.values);
    CHECK(a.values.front() == 0.0);

    spec.level = 23;
    CHECK_THROWS_AS(fbm_sample(spec), std::invalid_argument);  // level guard
    spec.level = 10;
    spec.hurst = 1.0;
    CHECK_THROWS_AS(fbm_sample(spec), std::invalid_argument);
}

TEST_CASE("brownian case has iid increments of the right size") {
    FbmSpec spec;
    spec.hurst = 0.5;
    spec.level = 14;
    spec.seed = 7;
    const SampledPath w = fbm_sample(spec);
    long double sumsq = 0.0L;
    for (std::size_t j = 1; j < w.values.size(); ++j) {
        const double inc = w.values[j] - w.values[j - 1];
        sumsq += inc * inc;
    }
    // chi-square concentration: relative error ~ sqrt(2/2^14) ~ 1.1%
    CHECK(static_cast<double>(sumsq) == Approx(1.0).epsilon(0.06));
}

TEST_CASE("fbm normalization and covariance across paths") {
    for (double h : {0.3, 0.5, 0.7}) {  // h = 1/2: cov(W_.25, W_.75) = 0.25
        const std::int64_t paths = 3000;
        std::vector<double> w1(static_cast<std::size_t>(paths));
        std::vector<double> prod(static_cast<std::size_t>(paths));
        for (std::int64_t p = 0; p < paths; ++p) {
            FbmSpec spec;
            spec.hurst = h;
            spec.level = 4;
            spec.seed = substream_seed(2024, static_cast<std::uint64_t>(p) + 10000 * (h > 0.5));
            const SampledPath w = fbm_sample(spec);
            w1[static_cast<std::size_t>(p)] = w.values.back();
            prod[static_cast<std::size_t>(p)] = w.values[4] * w.values[12];  // t=0.25, 0.75
        }
        // E[W_1^2] = 1; SE of the mean of W_1^2 is sqrt(2/paths)
        std::vector<double> sq(w1.size());
        for (std::size_t i = 0; i < w1.size(); ++i) sq[i] = w1[i] * w1[i];
        CHECK(mean_of(sq) == Approx(1.0).margin(3.0 * std::sqrt(2.0 / paths)));

        // E[W_s W_t] = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2
        const double expected =
            0.5 * (std::pow(0.25, 2 * h) + std::pow(0.75, 2 * h) - std::pow(0.5, 2 * h));
        const double se = sd_of(prod) / std::sqrt(static_cast<double>(paths));
        CHECK(mean_of(prod) == Approx(expected).margin(3.5 * se));
    }
}

TEST_CASE("fbm increments are stationary across the grid") {
    const std::int64_t paths = 4000;
    const double h = 0.3;
    const int level = 5;
    std::vector<std::vector<double>> incs(4, std::vector<double>(paths));
    for (std::int64_t p = 0; p < paths; ++p) {
        FbmSpec spec;
        spec.hurst = h;
        spec.level = level;
        spec.seed = substream_seed(99, static_cast<std::uint64_t>(p));
        const SampledPath w = fbm_sample(spec);
        const std::size_t picks[] = {1, 9, 17, 30};
        for (std::size_t q = 0; q < 4; ++q) {
            const std::size_t j = picks[q];
            incs[q][static_cast<std::size_t>(p)] = w.values[j] - w.values[j - 1];
        }
    }
    const double var0 = std::exp2(-2.0 * h * level);
    for (const auto& sample : incs) {
        std::vector<double> sq(sample.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = sample[i] * sample[i];
        CHECK(mean_of(sq) == Approx(var0).epsilon(5.0 * std::sqrt(2.0 / paths)));
    }
}

TEST_CASE("cholesky route matches the circulant law") {
    const double h = 0.35;
    const int level = 4;
    const std::int64_t paths = 3000;
    double mean_sq_chol = 0.0, mean_sq_circ = 0.0;
    for (std::int64_t p = 0; p < paths; ++p) {
        FbmSpec spec;
        spec.hurst = h;
        spec.level = level;
        spec.seed = substream_seed(31337, static_cast<std::uint64_t>(p));
        spec.method = FbmMethod::cholesky;
        const double a = fbm_sample(spec).values.back();
        spec.method = FbmMethod::circulant;
        const double b = fbm_sample(spec).values.back();
        mean_sq_chol += a * a;
        mean_sq_circ += b * b;
    }
    mean_sq_chol /= static_cast<double>(paths);
    mean_sq_circ /= static_cast<double>(paths);
    const double band = 3.0 * std::sqrt(2.0 / static_cast<double>(paths));
    CHECK(mean_sq_chol == Approx(1.0).margin(band));
    CHECK(mean_sq_circ == Approx(1.0).margin(band));

    FbmSpec guard;
    guard.hurst = h;
    guard.level = 13;
    guard.method = FbmMethod::cholesky;
    CHECK_THROWS_AS(fbm_sample(guard), std::invalid_argument);
}

TEST_CASE("weighted quadratic variation is near one") {
    for (double h : {0.3, 0.7}) {
        const int n = 10;
        const std::int64_t paths = 50;
        double acc = 0.0;
        for (std::int64_t p = 0; p < paths; ++p) {
            FbmSpec spec;
            spec.hurst = h;
            spec.level = n;
            spec.seed = substream_seed(606, static_cast<std::uint64_t>(p) + (h > 0.5 ? 500 : 0));
            acc += std::exp2((2.0 * h - 1.0) * n) * p_variation(fbm_sample(spec), 2.0, n);
        }
        CHECK(acc / static_cast<double>(paths) == Approx(1.0).epsilon(0.15));
    }
}

TEST_CASE("fou with zero reversion is exactly a shifted fbm") {
    FouSpec spec;
    spec.hurst = 0.4;
    spec.x0 = 1.25;
    spec.rho = 0.0;
    spec.mu = 9.0;
    spec.level = 9;
    spec.seed = 77;
    const SampledPath x = fou_euler(spec);
    FbmSpec fspec;
    fspec.hurst = 0.4;
    fspec.level = 9;
    fspec.seed = 77;
    const SampledPath w = fbm_sample(fspec);
    REQUIRE(x.values.size() == w.values.size());
    for (std::size_t j = 0; j < x.values.size(); ++j)
        CHECK(x.values[j] == spec.x0 + w.values[j]);
}

TEST_CASE("fou drift pulls the mean upward and refining the step is consistent") {
    // x0 = 0, mu = 2, rho = 0.2: the drift is positive near t = 1
    const std::int64_t paths = 1200;
    double mean_coarse = 0.0, mean_fine = 0.0;
    std::vector<double> coarse(static_cast<std::size_t>(paths));
    for (std::int64_t p = 0; p < paths; ++p) {
        FouSpec spec;
        spec.hurst = 0.3;
        spec.x0 = 0.0;
        spec.rho = 0.2;
        spec.mu = 2.0;
        spec.seed = substream_seed(888, static_cast<std::uint64_t>(p));
        spec.level = 7;
        const double a = fou_euler(spec).values.back();
        spec.level = 11;  // same seed, finer Euler grid
        const double b = fou_euler(spec).values.back();
        mean_coarse += a;
        mean_fine += b;
        coarse[static_cast<std::size_t>(p)] = a;
    }
    mean_coarse /= static_cast<double>(paths);
    mean_fine /= static_cast<double>(paths);
    CHECK(mean_coarse > 0.0);
    const double se = sd_of(coarse) / std::sqrt(static_cast<double>(paths));
    CHECK(mean_coarse == Approx(mean_fine).margin(3.0 * se * std::sqrt(2.0)));
}

TEST_CASE("fou long-run mean approaches mu under strong reversion") {
    const std::int64_t paths = 4000;
    double acc = 0.0;
    for (std::int64_t p = 0; p < paths; ++p) {
        FouSpec spec;
        spec.hurst = 0.5;
        spec.x0 = 0.0;
        spec.rho = 20.0;
        spec.mu = 2.0;
        spec.level = 10;
        spec.seed = substream_seed(4242, static_cast<std::uint64_t>(p));
        acc += fou_euler(spec).values.back();
    }
    CHECK(std::fabs(acc / static_cast<double>(paths) - 2.0) < 0.1);
}

TEST_CASE("transforms") {
    const SampledPath x = testutil::random_path(6, 5);
    CHECK(apply_transform(x, TransformSpec{}).values == x.values);

    TransformSpec aff;
    aff.kind = TransformKind::affine;
    aff.a = 1.0;
    aff.b = 0.0;
    CHECK(apply_transform(x, aff).values == x.values);
    aff.a = 0.0;
    CHECK_THROWS_AS(apply_transform(x, aff), std::invalid_argument);

    TransformSpec e2;
    e2.kind = TransformKind::exp2;
    const SampledPath flat(3, std::vector<double>(9, 0.7));
    for (double v : apply_transform(flat, e2).values)
        CHECK(v == Approx(std::exp(1.4)).epsilon(1e-15));

    const SampledPath big(0, {0.0, 500.0});
    CHECK_THROWS_WITH(apply_transform(big, e2), Catch::Contains("index 1"));
}

TEST_CASE("riemann antiderivative basics") {
    // constant integrand: Y(t) = c t exactly at grid points
    const double c = 3.25;
    const SampledPath flat(8, std::vector<double>(257, c));
    const SampledPath y = riemann_antiderivative(flat, 6);
    for (std::int64_t j = 0; j <= y.last_index(); ++j)
        CHECK(y.values[static_cast<std::size_t>(j)] ==
              Approx(c * y.time_at(j)).margin(1e-13));

    // f(t) = t with right endpoints: Y(1) = (1 + 2^-N)/2
    const int fine = 10;
    std::vector<double> lin(static_cast<std::size_t>(pow2i(fine)) + 1);
    for (std::size_t j = 0; j < lin.size(); ++j)
        lin[j] = std::ldexp(static_cast<double>(j), -fine);
    const SampledPath ylin = riemann_antiderivative(SampledPath(fine, lin), 4);
    CHECK(ylin.values.back() == Approx(0.5 * (1.0 + std::exp2(-fine))).margin(1e-14));

    CHECK_THROWS_AS(riemann_antiderivative(flat, 9), std::invalid_argument);
}

TEST_CASE("riemann antiderivative is linear and monotone") {
    const SampledPath a = testutil::random_path(8, 61);
    const SampledPath b = testutil::random_path(8, 62);
    std::vector<double> mixv(a.values.size());
    for (std::size_t j = 0; j < mixv.size(); ++j) mixv[j] = 2.0 * a.values[j] - 3.0 * b.values[j];
    const SampledPath ya = riemann_antiderivative(a, 6);
    const SampledPath yb = riemann_antiderivative(b, 6);
    const SampledPath ym = riemann_antiderivative(SampledPath(8, mixv), 6);
    for (std::size_t j = 0; j < ym.values.size(); ++j)
        CHECK(ym.values[j] == Approx(2.0 * ya.values[j] - 3.0 * yb.values[j]).margin(1e-12));

    TransformSpec e2;
    e2.kind = TransformKind::exp2;  // positive integrand
    const SampledPath pos = apply_transform(testutil::random_path(8, 63), e2);
    const SampledPath ypos = riemann_antiderivative(pos, 8);
    for (std::size_t j = 1; j < ypos.values.size(); ++j)
        CHECK(ypos.values[j] >= ypos.values[j - 1]);
}

TEST_CASE("trapezoid rule integrates piecewise-linear paths exactly") {
    // hat function: closed-form primitive checked at the grid
    FaberSchauderCoeffs c = FaberSchauderCoeffs::zeros(1);
    c.theta[0][0] = 1.0;
    const SampledPath hat = synthesize(c, 6);
    const SampledPath y = riemann_antiderivative(hat, 6, IntegrationRule::trapezoid);
    for (std::int64_t j = 0; j <= y.last_index(); ++j)
        CHECK(y.values[static_cast<std::size_t>(j)] ==
              Approx(testutil::hat_primitive(y.time_at(j))).margin(1e-15));
}
