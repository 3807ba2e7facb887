// Command-line frontend: experiment runner, feasible-set sampler, bound
// tightening, and image metrics.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ordres/ordres.hpp"

namespace {

ordres::ImageGrid load_grid(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".pgm") return ordres::read_pgm(path);
    return ordres::read_signal_csv(path);
}

int run_command(const std::string& config_path, long long seed_override, const std::string& out_override) {
    auto toml = ordres::TomlTable::parse_file(config_path);
    auto cfg = ordres::parse_experiment_config(toml);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.output_dir = out_override;
    const auto report = ordres::run_experiment(cfg);
    std::cout << report.json.dump(2) << "\n";
    return 0;
}

int sample_set_command(const std::string& config_path, long long seed_override, const std::string& out_override) {
    auto toml = ordres::TomlTable::parse_file(config_path);
    auto cfg = ordres::parse_experiment_config(toml);
    cfg.scenario = "feasible2d";
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.output_dir = out_override;
    const auto report = ordres::run_feasible2d_experiment(cfg);
    std::cout << report.json.dump(2) << "\n";
    return 0;
}

int tighten_command(const std::string& lower, const std::string& upper, const std::string& v_path,
                    const std::string& g_path, std::string out_lower, std::string out_upper) {
    const auto lo = ordres::read_matrix_market(lower);
    const auto up = ordres::read_matrix_market(upper);
    const auto v = ordres::read_signal_csv(v_path);
    const auto g = ordres::read_signal_csv(g_path);
    const ordres::IntervalOperator op(lo, up);
    const auto tightened = ordres::tighten_bounds(op, v, g);
    if (out_lower.empty()) out_lower = lower + ".tightened";
    if (out_upper.empty()) out_upper = upper + ".tightened";
    ordres::write_matrix_market(tightened.lower(), out_lower);
    ordres::write_matrix_market(tightened.upper(), out_upper);
    nlohmann::json j{{"lower", out_lower}, {"upper", out_upper}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int metrics_command(const std::string& image, const std::string& reference, double peak) {
    const auto img = load_grid(image);
    const auto ref = load_grid(reference);
    const double p = ordres::psnr(img, ref, peak);
    nlohmann::json j;
    j["psnr"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
    j["ssim"] = ordres::ssim(img, ref);
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval-bound residual reconstruction toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;

    auto* run = app.add_subcommand("run", "Run a deblurring/sampling/tightening experiment from a TOML config");
    run->add_option("--config", config_path, "TOML experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Override the output directory");

    auto* sample = app.add_subcommand("sample-set", "Sample and classify the 2D feasible set");
    sample->add_option("--config", config_path, "TOML sampler config")->required()->check(CLI::ExistingFile);
    sample->add_option("--seed", seed, "Override the config seed");
    sample->add_option("--out", out_dir, "Override the output directory");

    std::string lower, upper, v_path, g_path, out_lower, out_upper;
    auto* tighten = app.add_subcommand("tighten", "Tighten interval operator bounds under A v = g");
    tighten->add_option("--lower", lower, "Lower bound matrix (MatrixMarket)")->required()->check(CLI::ExistingFile);
    tighten->add_option("--upper", upper, "Upper bound matrix (MatrixMarket)")->required()->check(CLI::ExistingFile);
    tighten->add_option("--v", v_path, "Constraint vector v (single-column CSV)")->required()->check(CLI::ExistingFile);
    tighten->add_option("--g", g_path, "Constraint rhs g (single-column CSV)")->required()->check(CLI::ExistingFile);
    tighten->add_option("--out-lower", out_lower, "Output path for the tightened lower bound");
    tighten->add_option("--out-upper", out_upper, "Output path for the tightened upper bound");

    std::string image, reference;
    double peak = 255.0;
    auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM of an image against a reference");
    metrics->add_option("--image", image, "Image (PGM) or signal (CSV)")->required()->check(CLI::ExistingFile);
    metrics->add_option("--reference", reference, "Reference image or signal")->required()->check(CLI::ExistingFile);
    metrics->add_option("--peak", peak, "Peak value for PSNR");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, seed, out_dir);
        if (sample->parsed()) return sample_set_command(config_path, seed, out_dir);
        if (tighten->parsed()) return tighten_command(lower, upper, v_path, g_path, out_lower, out_upper);
        if (metrics->parsed()) return metrics_command(image, reference, peak);
    } catch (const ordres::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
