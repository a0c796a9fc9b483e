// roughness-kit: estimate the roughness exponent of a latent trajectory from
// discrete observations of its antiderivative, simulate test processes, and
// reproduce the Monte Carlo studies as CSV summaries.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roughness/estimators.hpp"
#include "roughness/faber_schauder.hpp"
#include "roughness/fbm_theory.hpp"
#include "roughness/generators.hpp"
#include "roughness/harness.hpp"
#include "roughness/path.hpp"
#include "roughness/scale_estimator.hpp"

namespace {

std::vector<double> parse_weights(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

struct GridSpec {
    double start = 0.01, end = 0.99, step = 0.01;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &g.start, &g.end, &g.step) != 3)
        throw std::invalid_argument("grid must look like start:end:step");
    if (!(g.step > 0.0) || g.end < g.start)
        throw std::invalid_argument("bad grid bounds");
    return g;
}

roughness::TransformSpec make_transform(const std::string& kind, double a, double b, double p) {
    roughness::TransformSpec t;
    if (kind == "identity")
        t.kind = roughness::TransformKind::identity;
    else if (kind == "exp2")
        t.kind = roughness::TransformKind::exp2;
    else if (kind == "affine")
        t.kind = roughness::TransformKind::affine;
    else if (kind == "power")
        t.kind = roughness::TransformKind::power;
    else
        throw std::invalid_argument("unknown transform: " + kind);
    t.a = a;
    t.b = b;
    t.p = p;
    return t;
}

int run_synth(double r, int level, int depth, const std::string& out,
              const std::string& coeffs_out, bool antiderivative) {
    using namespace roughness;
    if (depth < 0) depth = level;
    if (antiderivative) {
        write_path_csv(takagi_antiderivative(r, level), out);
    } else {
        write_path_csv(takagi_landsberg(r, depth, level), out);
    }
    if (!coeffs_out.empty()) {
        const SampledPath path = takagi_landsberg(r, depth, level);
        write_coeffs_csv(analyze(path), coeffs_out);
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_estimate(const std::string& input, int n, const std::string& method, double x0_hat,
                 int m, const std::string& alpha_csv, const std::string& series_out,
                 const std::string& out) {
    using namespace roughness;
    const SampledPath y = read_path_csv(input);

    double estimate = 0.0;
    if (method == "rhat") {
        estimate = rhat(y, n);
    } else if (method == "rhat-star") {
        estimate = rhat_star(y, n);
    } else if (method == "rtilde") {
        estimate = rtilde(y, n, x0_hat);
    } else if (method == "seq-scale") {
        ScaleConfig cfg;
        cfg.m = m;
        cfg.alpha = parse_weights(alpha_csv);
        const ScaleResult res = seq_scale_estimate(y, n, cfg);
        estimate = res.r_s;
        std::printf("lambda_s: %.12g\n", res.lambda_s);
        if (!out.empty()) {
            std::ofstream f(out);
            if (!f) throw std::runtime_error("cannot open " + out);
            f << "lambda_s,r_s,c_s";
            for (int k = n - cfg.m - 1; k <= n; ++k) f << ",beta_" << k;
            f << '\n';
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", res.lambda_s, res.r_s, res.c_s);
            f << buf;
            for (double b : res.beta) {
                std::snprintf(buf, sizeof(buf), ",%.17g", b);
                f << buf;
            }
            f << '\n';
        }
    } else {
        throw std::invalid_argument("unknown method: " + method);
    }
    std::printf("%s estimate (n=%d): %.12g\n", method.c_str(), n, estimate);

    if (!series_out.empty()) {
        std::ofstream f(series_out);
        if (!f) throw std::runtime_error("cannot open " + series_out);
        f << "k,rhat_k\n";
        char buf[64];
        for (int k = 1; k <= n; ++k) {
            if (method == "rhat-star") {
                if (k + 1 > y.level) break;
                std::snprintf(buf, sizeof(buf), "%d,%.17g", k, rhat_star(y, k));
            } else {
                if (k + 2 > y.level) break;
                std::snprintf(buf, sizeof(buf), "%d,%.17g", k, rhat(y, k));
            }
            f << buf << '\n';
        }
    }
    return 0;
}

int run_simulate(const std::string& model, double hurst, int level, std::uint64_t seed,
                 double x0, double rho, double mu, const std::string& transform, double ta,
                 double tb, double tp, int integrate_to, const std::string& method,
                 const std::string& out) {
    using namespace roughness;
    SampledPath path(0, {0.0, 0.0});
    if (model == "fbm") {
        FbmSpec spec;
        spec.hurst = hurst;
        spec.level = level;
        spec.seed = seed;
        if (method == "circulant")
            spec.method = FbmMethod::circulant;
        else if (method == "cholesky")
            spec.method = FbmMethod::cholesky;
        path = fbm_sample(spec);
    } else if (model == "fou") {
        FouSpec spec;
        spec.hurst = hurst;
        spec.x0 = x0;
        spec.rho = rho;
        spec.mu = mu;
        spec.level = level;
        spec.seed = seed;
        path = fou_euler(spec);
    } else {
        throw std::invalid_argument("unknown model: " + model);
    }
    path = apply_transform(path, make_transform(transform, ta, tb, tp));
    if (integrate_to >= 0) path = riemann_antiderivative(path, integrate_to);
    write_path_csv(path, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_theory(const std::string& table, double hurst, const std::string& h_grid,
               std::int64_t max_lag, const std::string& out) {
    using namespace roughness;
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw std::runtime_error("cannot open " + out);
        os = &file;
    }
    char buf[256];
    if (table == "alpha-beta") {
        const GridSpec grid = parse_grid(h_grid);
        *os << "hurst,alpha,beta,ratio\n";
        for (double h = grid.start; h <= grid.end + 1e-12; h += grid.step) {
            const AsymptoticConstants c = asymptotic_constants(h);
            std::snprintf(buf, sizeof(buf), "%.6g,%.17g,%.17g,%.17g", h, c.alpha, c.beta, c.ratio);
            *os << buf << '\n';
        }
    } else if (table == "gh") {
        const GhTable t = make_gh_table(hurst, max_lag);
        *os << "lag,h1,h2,h3,g\n";
        for (std::size_t lag = 0; lag < t.values.size(); ++lag) {
            const GhComponents& c = t.components[lag];
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g", lag, c.h1, c.h2, c.h3,
                          t.values[lag]);
            *os << buf << '\n';
        }
    } else if (table == "constants") {
        const AsymptoticConstants c = asymptotic_constants(hurst);
        *os << "hurst,theta_norm_sq_limit,z_norm_limit,alpha,beta,w_norm_limit,ratio\n";
        std::snprintf(buf, sizeof(buf), "%.6g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", c.hurst,
                      c.theta_norm_sq_limit, c.z_norm_limit, c.alpha, c.beta, c.w_norm_limit,
                      c.ratio);
        *os << buf << '\n';
    } else {
        throw std::invalid_argument("unknown table: " + table);
    }
    if (!out.empty()) std::cout << "wrote " << out << "\n";
    return 0;
}

int run_exp(const std::string& config, const std::string& out, int workers) {
    using namespace roughness;
    std::ifstream f(config);
    if (!f) throw std::runtime_error("cannot open " + config);
    nlohmann::json j;
    f >> j;
    const ExperimentSpec spec = experiment_spec_from_json(j);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    const ExperimentResult result = run_experiment(spec, workers);
    summarize_to_csv(result, out);
    for (const CellResult& c : result.cells)
        std::printf("%-9s n=%-3d count=%lld degenerate=%lld median=%.6f mean=%.6f sd=%.6f\n",
                    to_string(c.estimator).c_str(), c.n, static_cast<long long>(c.stats.count),
                    static_cast<long long>(c.stats.degenerate), c.stats.median, c.stats.mean,
                    c.stats.sd);
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"roughness exponent estimation toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate Takagi-Landsberg fixtures");
    double synth_r = 0.5;
    int synth_level = 10, synth_depth = -1;
    bool synth_antider = false;
    std::string synth_out, synth_coeffs;
    synth->add_option("--takagi", synth_r, "roughness parameter R in (0,1]")->required();
    synth->add_option("--level", synth_level, "grid refinement N")->required();
    synth->add_option("--depth", synth_depth, "truncation depth (default: level)");
    synth->add_flag("--antiderivative", synth_antider, "emit the exact antiderivative instead");
    synth->add_option("--out", synth_out, "output path CSV")->required();
    synth->add_option("--coeffs-out", synth_coeffs, "also export coefficients as m,k,theta CSV");

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate the roughness exponent from a path CSV");
    std::string est_input, est_method = "rhat", est_alpha = "1,1,1,1", est_series, est_out;
    int est_n = 0, est_m = 3;
    double est_x0hat = 0.0;
    est->add_option("--input", est_input, "path CSV (antiderivative samples)")->required();
    est->add_option("--n", est_n, "estimation level n")->required();
    est->add_option("--method", est_method, "rhat | rhat-star | rtilde | seq-scale");
    est->add_option("--x0-hat", est_x0hat, "initial-value guess for rtilde");
    est->add_option("--m", est_m, "seq-scale window length");
    est->add_option("--alpha", est_alpha, "seq-scale weights, comma separated (m+1 values)");
    est->add_option("--series-out", est_series, "write per-level series CSV k,rhat_k");
    est->add_option("--out", est_out, "seq-scale: write lambda_s, r_s, beta CSV");

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate fBM / fOU paths");
    std::string sim_model = "fbm", sim_transform = "identity", sim_method = "auto", sim_out;
    double sim_h = 0.5, sim_x0 = 0.0, sim_rho = 0.0, sim_mu = 0.0;
    double sim_ta = 1.0, sim_tb = 0.0, sim_tp = 1.0;
    int sim_level = 10, sim_integrate = -1;
    std::uint64_t sim_seed = 0;
    sim->add_option("--model", sim_model, "fbm | fou")->required();
    sim->add_option("--hurst", sim_h, "Hurst parameter in (0,1)")->required();
    sim->add_option("--level", sim_level, "grid refinement N")->required();
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--x0", sim_x0, "fOU start value");
    sim->add_option("--rho", sim_rho, "fOU mean-reversion speed");
    sim->add_option("--mu", sim_mu, "fOU mean level");
    sim->add_option("--transform", sim_transform, "identity | exp2 | affine | power");
    sim->add_option("--transform-a", sim_ta, "affine slope");
    sim->add_option("--transform-b", sim_tb, "affine offset");
    sim->add_option("--transform-p", sim_tp, "power exponent");
    sim->add_option("--integrate-to", sim_integrate, "emit Riemann antiderivative at this level");
    sim->add_option("--method", sim_method, "fbm sampler: auto | circulant | cholesky");
    sim->add_option("--out", sim_out, "output path CSV")->required();

    // theory
    auto* theo = app.add_subcommand("theory", "closed-form constants and tables");
    std::string theo_table = "constants", theo_grid = "0.01:0.99:0.01", theo_out;
    double theo_h = 0.5;
    std::int64_t theo_maxlag = 16;
    theo->add_option("--table", theo_table, "constants | alpha-beta | gh");
    theo->add_option("--hurst", theo_h, "Hurst parameter");
    theo->add_option("--h-grid", theo_grid, "start:end:step grid for alpha-beta");
    theo->add_option("--max-lag", theo_maxlag, "largest lag for the gh table");
    theo->add_option("--out", theo_out, "output CSV (default: stdout)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a Monte Carlo study from a JSON config");
    std::string exp_config, exp_out;
    int exp_workers = 0;
    exp->add_option("--config", exp_config, "JSON config mirroring the experiment spec")->required();
    exp->add_option("--out", exp_out, "summary CSV")->required();
    exp->add_option("--workers", exp_workers, "worker threads (default: hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return run_synth(synth_r, synth_level, synth_depth, synth_out, synth_coeffs,
                             synth_antider);
        if (est->parsed())
            return run_estimate(est_input, est_n, est_method, est_x0hat, est_m, est_alpha,
                                est_series, est_out);
        if (sim->parsed())
            return run_simulate(sim_model, sim_h, sim_level, sim_seed, sim_x0, sim_rho, sim_mu,
                                sim_transform, sim_ta, sim_tb, sim_tp, sim_integrate, sim_method,
                                sim_out);
        if (theo->parsed()) return run_theory(theo_table, theo_h, theo_grid, theo_maxlag, theo_out);
        if (exp->parsed()) return run_exp(exp_config, exp_out, exp_workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
