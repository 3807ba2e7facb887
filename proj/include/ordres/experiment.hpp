#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ordres/errors.hpp"
#include "ordres/lattice_sets.hpp"
#include "ordres/metrics.hpp"
#include "ordres/operators.hpp"
#include "ordres/phantoms.hpp"
#include "ordres/rng.hpp"
#include "ordres/solver.hpp"
#include "ordres/tightening.hpp"
#include "ordres/toml.hpp"

namespace ordres {

struct ExperimentConfig {
    std::string scenario = "deblur1d";  // deblur1d | deblur2d | feasible2d | tighten

    PhantomKind phantom_kind = PhantomKind::steps1d;
    int phantom_rows = 200;
    int phantom_cols = 1;
    std::string phantom_path;

    double blur_sigma = 0.5;
    Boundary blur_boundary = Boundary::dirichlet;
    int blur_radius = -1;     // < 0: ceil(4 sigma)
    int window_margin = 2;    // perturbation window radius = blur radius + margin

    // Raw multipliers; exactly one of data_abs/data_rel applies (abs wins).
    double data_abs = -1.0;   // absolute half-width c of the uniform data noise
    double data_rel = 0.005;  // c = data_rel * max |ground truth|
    double operator_rel = 0.05;

    double bounds_rel = 0.05;  // d = bounds_rel * max entry of the cleaned estimate
    bool support_aware = true;

    SolverConfig solver;
    bool write_traces = false;

    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // feasible2d
    int set_samples = 4000;
    std::vector<double> set_region = {0.0, 25.0, 0.0, 25.0};
    std::vector<double> set_a_l, set_a_u, set_v;  // optional explicit rows
    double set_f = std::numeric_limits<double>::quiet_NaN();
    double set_g = std::numeric_limits<double>::quiet_NaN();

    // tighten
    std::string tighten_lower, tighten_upper, tighten_v, tighten_g;
    std::string tighten_out_lower, tighten_out_upper;
};

inline ExperimentConfig parse_experiment_config(const TomlTable& t) {
    ExperimentConfig c;
    c.scenario = t.get_string("scenario", c.scenario);
    c.phantom_kind = phantom_kind_from_string(t.get_string("phantom.kind", "steps1d"));
    if (t.has("phantom.length")) {
        c.phantom_rows = static_cast<int>(t.get_int("phantom.length", 200));
        c.phantom_cols = 1;
    } else {
        c.phantom_rows = static_cast<int>(t.get_int("phantom.rows", 128));
        c.phantom_cols = static_cast<int>(t.get_int("phantom.cols", 128));
    }
    if (c.scenario == "deblur1d") c.phantom_cols = 1;
    c.phantom_path = t.get_string("phantom.path", "");

    c.blur_sigma = t.get_double("blur.sigma", c.blur_sigma);
    c.blur_boundary = boundary_from_string(t.get_string("blur.boundary", "dirichlet"));
    c.blur_radius = static_cast<int>(t.get_int("blur.radius", -1));
    c.window_margin = static_cast<int>(t.get_int("blur.window_margin", 2));

    c.data_abs = t.get_double("noise.data_abs", -1.0);
    c.data_rel = t.get_double("noise.data_rel", c.data_rel);
    c.operator_rel = t.get_double("noise.operator_rel", c.operator_rel);
    c.bounds_rel = t.get_double("bounds.level", c.bounds_rel);
    c.support_aware = t.get_bool("bounds.support_aware", true);

    c.solver.max_iterations = static_cast<int>(t.get_int("solver.max_iterations", c.solver.max_iterations));
    c.solver.tolerance = t.get_double("solver.tolerance", c.solver.tolerance);
    c.solver.gamma = t.get_double("solver.gamma", c.solver.gamma);
    c.solver.tv_variant = tv_variant_from_string(t.get_string("solver.tv", "isotropic"));
    c.solver.step_ratio = t.get_double("solver.step_ratio", c.solver.step_ratio);
    c.solver.over_relaxation = t.get_double("solver.over_relaxation", c.solver.over_relaxation);
    c.solver.check_interval = static_cast<int>(t.get_int("solver.check_interval", c.solver.check_interval));
    c.solver.feasibility_tol = t.get_double("solver.feasibility_tol", c.solver.feasibility_tol);
    c.write_traces = t.get_bool("solver.trace", false);

    c.seed = static_cast<std::uint64_t>(t.get_int("seed", 1));
    c.output_dir = t.get_string("output_dir", "out");

    c.set_samples = static_cast<int>(t.get_int("set.n_samples", c.set_samples));
    c.set_region = t.get_double_array("set.region", c.set_region);
    c.set_a_l = t.get_double_array("set.a_l", {});
    c.set_a_u = t.get_double_array("set.a_u", {});
    c.set_v = t.get_double_array("set.v", {});
    c.set_f = t.get_double("set.f", c.set_f);
    c.set_g = t.get_double("set.g", c.set_g);

    c.tighten_lower = t.get_string("tighten.lower", "");
    c.tighten_upper = t.get_string("tighten.upper", "");
    c.tighten_v = t.get_string("tighten.v", "");
    c.tighten_g = t.get_string("tighten.g", "");
    c.tighten_out_lower = t.get_string("tighten.out_lower", "");
    c.tighten_out_upper = t.get_string("tighten.out_upper", "");
    return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["scenario"] = c.scenario;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["phantom"] = {{"kind", c.phantom_kind == PhantomKind::steps1d      ? "steps1d"
                             : c.phantom_kind == PhantomKind::squares   ? "squares"
                             : c.phantom_kind == PhantomKind::thinlines ? "thinlines"
                                                                        : "file"},
                    {"rows", c.phantom_rows},
                    {"cols", c.phantom_cols},
                    {"path", c.phantom_path}};
    j["blur"] = {{"sigma", c.blur_sigma},
                 {"boundary", c.blur_boundary == Boundary::dirichlet ? "dirichlet" : "neumann"},
                 {"radius", c.blur_radius},
                 {"window_margin", c.window_margin}};
    j["noise"] = {{"data_abs", c.data_abs}, {"data_rel", c.data_rel}, {"operator_rel", c.operator_rel}};
    j["bounds"] = {{"level", c.bounds_rel}, {"support_aware", c.support_aware}};
    j["solver"] = {{"max_iterations", c.solver.max_iterations},
                   {"tolerance", c.solver.tolerance},
                   {"gamma", c.solver.gamma},
                   {"tv", c.solver.tv_variant == TvVariant::isotropic ? "isotropic" : "anisotropic"},
                   {"step_ratio", c.solver.step_ratio},
                   {"over_relaxation", c.solver.over_relaxation},
                   {"check_interval", c.solver.check_interval},
                   {"feasibility_tol", c.solver.feasibility_tol},
                   {"trace", c.write_traces}};
    return j;
}

struct VariantResult {
    std::string name;
    Solution solution;
    double psnr_db = 0.0;
    double ssim_value = 0.0;
    bool member_of_bounds = false;  // interval variants: member_U wiring check
    std::string output_path;
};

struct ExperimentReport {
    ExperimentConfig config;
    nlohmann::json json;
    ImageGrid ground_truth;
    ImageGrid noisy_data;
    std::vector<VariantResult> variants;

    const VariantResult& variant(const std::string& name) const {
        for (const auto& v : variants)
            if (v.name == name) return v;
        throw std::runtime_error("ExperimentReport: no variant named " + name);
    }
};

namespace experiment_detail {

inline nlohmann::json metric_json(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return value;
}

inline nlohmann::json variant_json(const VariantResult& v) {
    return {{"psnr", metric_json(v.psnr_db)},
            {"ssim", v.ssim_value},
            {"objective", v.solution.objective_value},
            {"iterations", v.solution.iterations_used},
            {"residual", v.solution.primal_dual_residual},
            {"converged", v.solution.converged},
            {"member_of_bounds", v.member_of_bounds},
            {"slacks",
             {{"u_min", v.solution.constraint_slacks.u_min},
              {"upper_violation", v.solution.constraint_slacks.upper_violation},
              {"lower_violation", v.solution.constraint_slacks.lower_violation}}},
            {"output", v.output_path}};
}

}  // namespace experiment_detail

// Full measurement pipeline: blur the phantom, add uniform data noise,
// perturb/clean the operator, derive interval bounds, then reconstruct with
// the exact operator, the noisy operator, and the interval bounds.
inline ExperimentReport run_deblur_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const bool is_2d = cfg.scenario == "deblur2d";
    if (cfg.phantom_kind == PhantomKind::steps1d && is_2d)
        throw std::invalid_argument("run_experiment: steps1d phantom is one-dimensional");

    ExperimentReport rep;
    rep.config = cfg;
    fs::create_directories(cfg.output_dir);

    const ImageGrid truth = generate_phantom(cfg.phantom_kind, cfg.phantom_rows, cfg.phantom_cols, cfg.phantom_path);
    const GridShape shape{truth.rows(), truth.cols()};
    const int n = truth.rows() * truth.cols();

    const int radius = cfg.blur_radius >= 0 ? cfg.blur_radius : detail::default_radius(cfg.blur_sigma);
    const SparseMatrix a = is_2d
        ? gaussian_blur_matrix_2d(truth.rows(), truth.cols(), cfg.blur_sigma, cfg.blur_boundary, radius)
        : gaussian_blur_matrix_1d(n, cfg.blur_sigma, cfg.blur_boundary, radius);
    const SparseMatrix window = is_2d
        ? gaussian_blur_matrix_2d(truth.rows(), truth.cols(), cfg.blur_sigma, cfg.blur_boundary,
                                  radius + cfg.window_margin)
        : gaussian_blur_matrix_1d(n, cfg.blur_sigma, cfg.blur_boundary, radius + cfg.window_margin);

    const double c = cfg.data_abs >= 0.0 ? cfg.data_abs : cfg.data_rel * truth.max_abs();
    ImageGrid f(truth.rows(), truth.cols());
    {
        const auto blurred = a.apply(truth.values());
        Rng rng(cfg.seed);
        for (int i = 0; i < n; ++i) f[i] = blurred[i] + rng.uniform_pm1() * c;
    }

    const double d_perturb = cfg.operator_rel * a.max_entry();
    const SparseMatrix a_noisy_raw = perturb_operator(a, cfg.operator_rel, cfg.seed + 1, &window);
    const SparseMatrix a_noisy = threshold_and_normalize(a_noisy_raw, d_perturb);
    const double d_bounds = cfg.bounds_rel * a_noisy.max_entry();
    const IntervalOperator bounds = interval_from_estimate(a_noisy, d_bounds, cfg.support_aware);
    const BoundedData fdata = data_bounds(f, c);

    auto save = [&](const ImageGrid& img, const std::string& stem) {
        const std::string path =
            (fs::path(cfg.output_dir) / (stem + (is_2d ? std::string(".pgm") : std::string(".csv")))).string();
        if (is_2d) write_pgm(img, path);
        else write_signal_csv(img, path);
        return path;
    };

    const std::string truth_path = save(truth, "ground_truth");
    const std::string data_path = save(f, "blurred_noisy");

    auto run_variant = [&](const std::string& name, const SparseMatrix* exact_op, TvVariant tv,
                           bool interval_variant) {
        SolverConfig sc = cfg.solver;
        sc.tv_variant = tv;
        if (cfg.write_traces) sc.trace_path = (fs::path(cfg.output_dir) / ("trace_" + name + ".csv")).string();
        VariantResult vr;
        vr.name = name;
        if (interval_variant) {
            FeasibilityProblem problem(bounds, fdata);
            vr.solution = solve_constrained_tv(problem, sc, shape);
            vr.member_of_bounds =
                member_U(vr.solution.u, problem, sc.feasibility_tol * std::max(1.0, fdata.upper.max_abs())).member;
        } else {
            vr.solution = solve_residual_linf(*exact_op, f, c, sc, shape);
        }
        vr.psnr_db = psnr(vr.solution.u, truth);
        vr.ssim_value = ssim(vr.solution.u, truth);
        vr.output_path = save(vr.solution.u, "recon_" + name);
        return vr;
    };

    rep.variants.push_back(run_variant("exact", &a, cfg.solver.tv_variant, false));
    rep.variants.push_back(run_variant("noisy_operator", &a_noisy, cfg.solver.tv_variant, false));
    if (is_2d) {
        rep.variants.push_back(run_variant("interval_isotropic", nullptr, TvVariant::isotropic, true));
        rep.variants.push_back(run_variant("interval_anisotropic", nullptr, TvVariant::anisotropic, true));
    } else {
        rep.variants.push_back(run_variant("interval", nullptr, cfg.solver.tv_variant, true));
    }

    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    j["resolved"] = {{"data_c", c},
                     {"operator_d", d_perturb},
                     {"bounds_d", d_bounds},
                     {"blur_radius", radius},
                     {"operator_nnz", a.nnz()},
                     {"estimate_nnz", a_noisy.nnz()}};
    j["noisy_input"] = {{"psnr", experiment_detail::metric_json(psnr(f, truth))}, {"ssim", ssim(f, truth)}};
    j["outputs"] = {{"ground_truth", truth_path}, {"blurred_noisy", data_path}};
    for (const auto& v : rep.variants) j["variants"][v.name] = experiment_detail::variant_json(v);

    rep.ground_truth = truth;
    rep.noisy_data = f;
    rep.json = j;
    std::ofstream out(fs::path(cfg.output_dir) / "report.json");
    out << j.dump(2) << "\n";
    return rep;
}

// Draws the toy configuration from the seed when explicit rows are absent:
// A^l uniform in [0,1]^2, A^u in [1,2]^2, f generated by the midpoint matrix
// from a point in the region, v = ones and g = midpoint row sum.
inline Sampler2dConfig resolve_sampler_config(const ExperimentConfig& cfg) {
    Sampler2dConfig sc;
    sc.n_samples = cfg.set_samples;
    sc.seed = cfg.seed;
    if (cfg.set_region.size() == 4)
        for (int i = 0; i < 4; ++i) sc.region[i] = cfg.set_region[i];
    Rng rng(cfg.seed ^ 0x5eedULL);
    if (cfg.set_a_l.size() == 2 && cfg.set_a_u.size() == 2) {
        sc.a_l = cfg.set_a_l;
        sc.a_u = cfg.set_a_u;
    } else {
        sc.a_l = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        sc.a_u = {rng.uniform(1.0, 2.0), rng.uniform(1.0, 2.0)};
    }
    const double mid0 = 0.5 * (sc.a_l[0] + sc.a_u[0]);
    const double mid1 = 0.5 * (sc.a_l[1] + sc.a_u[1]);
    sc.v = cfg.set_v.size() == 2 ? cfg.set_v : std::vector<double>{1.0, 1.0};
    sc.f = std::isnan(cfg.set_f)
               ? mid0 * rng.uniform(sc.region[0], sc.region[1]) + mid1 * rng.uniform(sc.region[2], sc.region[3])
               : cfg.set_f;
    sc.g = std::isnan(cfg.set_g) ? mid0 * sc.v[0] + mid1 * sc.v[1] : cfg.set_g;
    return sc;
}

inline ExperimentReport run_feasible2d_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentReport rep;
    rep.config = cfg;
    fs::create_directories(cfg.output_dir);
    const Sampler2dConfig sc = resolve_sampler_config(cfg);
    const auto samples = sample_feasible_set_2d(sc);
    const std::string csv_path = (fs::path(cfg.output_dir) / "feasible_set.csv").string();
    write_samples_csv(samples, csv_path);
    int n_u = 0, n_uss = 0;
    for (const auto& s : samples) {
        n_u += s.in_U;
        n_uss += s.in_Ustarstar;
    }
    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    j["resolved"] = {{"a_l", sc.a_l}, {"a_u", sc.a_u}, {"f", sc.f}, {"v", sc.v}, {"g", sc.g},
                     {"n_samples", sc.n_samples},
                     {"region", std::vector<double>(sc.region, sc.region + 4)}};
    j["counts"] = {{"in_U", n_u}, {"in_Ustarstar", n_uss}};
    j["outputs"] = {{"samples", csv_path}};
    rep.json = j;
    std::ofstream out(fs::path(cfg.output_dir) / "report.json");
    out << j.dump(2) << "\n";
    return rep;
}

inline ExperimentReport run_tighten_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentReport rep;
    rep.config = cfg;
    fs::create_directories(cfg.output_dir);
    const SparseMatrix lo = read_matrix_market(cfg.tighten_lower);
    const SparseMatrix up = read_matrix_market(cfg.tighten_upper);
    const ImageGrid v = read_signal_csv(cfg.tighten_v);
    const ImageGrid g = read_signal_csv(cfg.tighten_g);
    const IntervalOperator op(lo, up);
    const IntervalOperator tightened = tighten_bounds(op, v, g);
    const std::string out_lo = cfg.tighten_out_lower.empty()
                                   ? (fs::path(cfg.output_dir) / "tightened_lower.mtx").string()
                                   : cfg.tighten_out_lower;
    const std::string out_up = cfg.tighten_out_upper.empty()
                                   ? (fs::path(cfg.output_dir) / "tightened_upper.mtx").string()
                                   : cfg.tighten_out_upper;
    write_matrix_market(tightened.lower(), out_lo);
    write_matrix_market(tightened.upper(), out_up);
    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    j["outputs"] = {{"lower", out_lo}, {"upper", out_up}};
    rep.json = j;
    std::ofstream out(fs::path(cfg.output_dir) / "report.json");
    out << j.dump(2) << "\n";
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.scenario == "deblur1d" || cfg.scenario == "deblur2d") return run_deblur_experiment(cfg);
    if (cfg.scenario == "feasible2d") return run_feasible2d_experiment(cfg);
    if (cfg.scenario == "tighten") return run_tighten_experiment(cfg);
    throw std::invalid_argument("run_experiment: unknown scenario " + cfg.scenario);
}

}  // namespace ordres
