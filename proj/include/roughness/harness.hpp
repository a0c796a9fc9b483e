#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "roughness/estimators.hpp"
#include "roughness/faber_schauder.hpp"
#include "roughness/generators.hpp"
#include "roughness/path.hpp"
#include "roughness/rng.hpp"
#include "roughness/scale_estimator.hpp"

namespace roughness {

enum class Model { fbm, fou, takagi };

enum class EstimatorKind { rhat, rhat_star, seq_scale, rtilde };

inline std::string to_string(Model m) {
    switch (m) {
        case Model::fbm: return "fbm";
        case Model::fou: return "fou";
        case Model::takagi: return "takagi";
    }
    return "?";
}

inline std::string to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::rhat: return "rhat";
        case EstimatorKind::rhat_star: return "rhat-star";
        case EstimatorKind::seq_scale: return "seq-scale";
        case EstimatorKind::rtilde: return "rtilde";
    }
    return "?";
}

inline Model model_from_string(const std::string& s) {
    if (s == "fbm") return Model::fbm;
    if (s == "fou") return Model::fou;
    if (s == "takagi") return Model::takagi;
    throw std::invalid_argument("unknown model: " + s);
}

inline EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "rhat") return EstimatorKind::rhat;
    if (s == "rhat-star") return EstimatorKind::rhat_star;
    if (s == "seq-scale") return EstimatorKind::seq_scale;
    if (s == "rtilde") return EstimatorKind::rtilde;
    throw std::invalid_argument("unknown estimator: " + s);
}

// One Monte Carlo study: which model, which grid sizes, which estimators.
// For the takagi model `hurst` is the roughness parameter of the fixture and
// the pipeline uses the exact antiderivative instead of Riemann integration
// (the fixture exists to exercise exact recovery; transform must be identity).
struct ExperimentSpec {
    Model model = Model::fbm;
    double hurst = 0.5;
    double x0 = 0.0;   // fou only
    double rho = 0.0;  // fou only
    double mu = 0.0;   // fou only
    TransformSpec transform{};
    std::vector<int> n_values;
    int fine_offset = 4;  // latent path lives at level max(n) + 2 + fine_offset
    std::int64_t paths = 200;
    std::uint64_t base_seed = 1;
    std::vector<EstimatorKind> estimators;
    ScaleConfig scale_cfg{};

    void validate() const {
        if (n_values.empty()) throw std::invalid_argument("ExperimentSpec: n_values empty");
        if (paths < 1) throw std::invalid_argument("ExperimentSpec: need paths >= 1");
        if (fine_offset < 0) throw std::invalid_argument("ExperimentSpec: fine_offset < 0");
        for (int n : n_values)
            if (n < 1) throw std::invalid_argument("ExperimentSpec: n values must be >= 1");
        if (model == Model::takagi && transform.kind != TransformKind::identity)
            throw std::invalid_argument("ExperimentSpec: takagi supports identity transform only");
        transform.validate();
        for (EstimatorKind e : estimators)
            if (e == EstimatorKind::seq_scale) scale_cfg.validate();
    }
};

struct SummaryStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::int64_t degenerate = 0;
};

struct CellResult {
    EstimatorKind estimator{};
    int n = 0;
    SummaryStats stats;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<CellResult> cells;
};

// Type-7 quantile (linear interpolation between order statistics), the
// convention box-plot comparisons in the docs assume.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline SummaryStats summarize(std::vector<double> values, std::int64_t degenerate) {
    SummaryStats s;
    s.degenerate = degenerate;
    s.count = static_cast<std::int64_t>(values.size());
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    long double mean = 0.0L;
    for (double v : values) mean += v;
    mean /= static_cast<long double>(values.size());
    long double var = 0.0L;
    for (double v : values) var += (v - static_cast<double>(mean)) * (v - static_cast<double>(mean));
    s.mean = static_cast<double>(mean);
    s.sd = values.size() > 1
               ? std::sqrt(static_cast<double>(var / static_cast<long double>(values.size() - 1)))
               : 0.0;
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    return s;
}

namespace detail {

struct PathEstimates {
    // one slot per (estimator index, n index); NaN marks a degenerate estimate
    std::vector<double> values;
};

inline double evaluate_estimator(EstimatorKind kind, const ExperimentSpec& spec,
                                 const SampledPath& latent, const SampledPath& y_fine, int n) {
    switch (kind) {
        case EstimatorKind::rhat:
            return rhat(restrict_to(y_fine, n + 2), n);
        case EstimatorKind::rhat_star:
            return rhat_star(restrict_to(latent, n + 1), n);
        case EstimatorKind::seq_scale:
            return seq_scale_estimate(restrict_to(y_fine, n + 2), n, spec.scale_cfg).r_s;
        case EstimatorKind::rtilde:
            return rtilde(restrict_to(y_fine, n + 2), n, 0.0);
    }
    throw std::logic_error("evaluate_estimator: unreachable");
}

}  // namespace detail

// Runs the study. Per-path seeds are derived from (base_seed, path index), and
// aggregation sorts the collected values, so the result does not depend on the
// worker count. Degenerate estimates are counted and excluded; generator
// failures abort the experiment.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 1) {
    spec.validate();
    const int max_n = *std::max_element(spec.n_values.begin(), spec.n_values.end());
    const int y_level = max_n + 2;
    const int fine_level = y_level + spec.fine_offset;

    const std::size_t cells = spec.estimators.size() * spec.n_values.size();
    std::vector<std::vector<double>> slots(cells,
                                           std::vector<double>(static_cast<std::size_t>(spec.paths),
                                                               std::numeric_limits<double>::quiet_NaN()));

    std::atomic<std::int64_t> next_path{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&]() {
        try {
            while (true) {
                const std::int64_t p = next_path.fetch_add(1);
                if (p >= spec.paths) break;
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error) break;
                }
                const std::uint64_t seed = substream_seed(spec.base_seed, static_cast<std::uint64_t>(p));

                SampledPath latent(0, {0.0, 0.0});
                SampledPath y_fine(0, {0.0, 0.0});
                if (spec.model == Model::takagi) {
                    latent = takagi_landsberg(spec.hurst, fine_level, fine_level);
                    y_fine = takagi_antiderivative(spec.hurst, y_level);
                } else {
                    SampledPath raw(0, {0.0, 0.0});
                    if (spec.model == Model::fbm) {
                        FbmSpec f;
                        f.hurst = spec.hurst;
                        f.level = fine_level;
                        f.seed = seed;
                        raw = fbm_sample(f);
                    } else {
                        FouSpec f;
                        f.hurst = spec.hurst;
                        f.x0 = spec.x0;
                        f.rho = spec.rho;
                        f.mu = spec.mu;
                        f.level = fine_level;
                        f.seed = seed;
                        raw = fou_euler(f);
                    }
                    latent = apply_transform(raw, spec.transform);
                    y_fine = riemann_antiderivative(latent, y_level);
                }

                for (std::size_t ei = 0; ei < spec.estimators.size(); ++ei)
                    for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
                        const std::size_t cell = ei * spec.n_values.size() + ni;
                        try {
                            slots[cell][static_cast<std::size_t>(p)] = detail::evaluate_estimator(
                                spec.estimators[ei], spec, latent, y_fine, spec.n_values[ni]);
                        } catch (const degenerate_input_error&) {
                            // slot stays NaN; counted below
                        }
                    }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ExperimentResult result;
    result.spec = spec;
    for (std::size_t ei = 0; ei < spec.estimators.size(); ++ei)
        for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
            const std::size_t cell = ei * spec.n_values.size() + ni;
            std::vector<double> kept;
            kept.reserve(slots[cell].size());
            std::int64_t degenerate = 0;
            for (double v : slots[cell]) {
                if (std::isnan(v))
                    ++degenerate;
                else
                    kept.push_back(v);
            }
            CellResult cr;
            cr.estimator = spec.estimators[ei];
            cr.n = spec.n_values[ni];
            cr.stats = summarize(std::move(kept), degenerate);
            result.cells.push_back(cr);
        }
    return result;
}

inline constexpr const char* kExperimentCsvHeader =
    "estimator,n,count,degenerate,mean,std,min,q1,median,q3,max,base_seed";

// One row per (estimator, n); fixed 12-column schema, deterministic bytes for
// a given result.
inline void summarize_to_csv(const ExperimentResult& result, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("summarize_to_csv: cannot open " + file);
    out << kExperimentCsvHeader << '\n';
    char buf[512];
    for (const CellResult& c : result.cells) {
        const SummaryStats& s = c.stats;
        std::snprintf(buf, sizeof(buf),
                      "%s,%d,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu",
                      to_string(c.estimator).c_str(), c.n, static_cast<long long>(s.count),
                      static_cast<long long>(s.degenerate), s.mean, s.sd, s.min, s.q1, s.median,
                      s.q3, s.max, static_cast<unsigned long long>(result.spec.base_seed));
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("summarize_to_csv: write failed for " + file);
}

// JSON config mirrors ExperimentSpec field for field.
inline ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    spec.model = model_from_string(j.at("model").get<std::string>());
    if (j.contains("hurst"))
        spec.hurst = j.at("hurst").get<double>();
    else
        spec.hurst = j.at("r").get<double>();  // alias for the takagi fixture
    spec.x0 = j.value("x0", 0.0);
    spec.rho = j.value("rho", 0.0);
    spec.mu = j.value("mu", 0.0);
    if (j.contains("transform")) {
        const auto& t = j.at("transform");
        const std::string kind = t.at("kind").get<std::string>();
        if (kind == "identity")
            spec.transform.kind = TransformKind::identity;
        else if (kind == "exp2")
            spec.transform.kind = TransformKind::exp2;
        else if (kind == "affine")
            spec.transform.kind = TransformKind::affine;
        else if (kind == "power")
            spec.transform.kind = TransformKind::power;
        else
            throw std::invalid_argument("unknown transform kind: " + kind);
        spec.transform.a = t.value("a", 1.0);
        spec.transform.b = t.value("b", 0.0);
        spec.transform.p = t.value("p", 1.0);
    }
    spec.n_values = j.at("n_values").get<std::vector<int>>();
    spec.fine_offset = j.value("fine_offset", 4);
    spec.paths = j.value("paths", std::int64_t{200});
    spec.base_seed = j.value("base_seed", std::uint64_t{1});
    for (const auto& e : j.at("estimators"))
        spec.estimators.push_back(estimator_from_string(e.get<std::string>()));
    if (j.contains("scale_cfg")) {
        spec.scale_cfg.m = j.at("scale_cfg").at("m").get<int>();
        spec.scale_cfg.alpha = j.at("scale_cfg").at("alpha").get<std::vector<double>>();
    }
    spec.validate();
    return spec;
}

inline nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["model"] = to_string(spec.model);
    j["hurst"] = spec.hurst;
    j["x0"] = spec.x0;
    j["rho"] = spec.rho;
    j["mu"] = spec.mu;
    const char* kind = "identity";
    switch (spec.transform.kind) {
        case TransformKind::identity: kind = "identity"; break;
        case TransformKind::exp2: kind = "exp2"; break;
        case TransformKind::affine: kind = "affine"; break;
        case TransformKind::power: kind = "power"; break;
    }
    j["transform"] = {{"kind", kind}, {"a", spec.transform.a}, {"b", spec.transform.b},
                      {"p", spec.transform.p}};
    j["n_values"] = spec.n_values;
    j["fine_offset"] = spec.fine_offset;
    j["paths"] = spec.paths;
    j["base_seed"] = spec.base_seed;
    std::vector<std::string> estimators;
    for (EstimatorKind e : spec.estimators) estimators.push_back(to_string(e));
    j["estimators"] = estimators;
    j["scale_cfg"] = {{"m", spec.scale_cfg.m}, {"alpha", spec.scale_cfg.alpha}};
    return j;
}

}  // namespace roughness
