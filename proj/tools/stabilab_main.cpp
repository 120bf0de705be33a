#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stabilab/csv.hpp"
#include "stabilab/experiment.hpp"

namespace {

using stabilab::ExperimentConfig;

struct CommonFlags {
    std::string preset;
    std::string config_file;
    std::string scheme;
    double theta = -1.0;
    std::int64_t mbar = -1;
    std::int64_t steps = -1;
    std::int64_t paths = -1;
    std::int64_t seed = -1;
    std::int64_t samples = -1;
    double radius = -1.0;
    double window = -1.0;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--preset", f.preset, "Built-in system (example1 | example2)");
    cmd->add_option("--config", f.config_file, "JSON experiment config");
    cmd->add_option("--scheme", f.scheme, "Scheme: em | theta | mtem");
    cmd->add_option("--theta", f.theta, "Theta for the theta scheme");
    cmd->add_option("--mbar", f.mbar, "Steps per maximum delay (delta = tau/mbar)");
    cmd->add_option("--steps", f.steps, "Number of integration steps");
    cmd->add_option("--paths", f.paths, "Ensemble size");
    cmd->add_option("--seed", f.seed, "Base seed for the noise streams");
    cmd->add_option("--samples", f.samples, "Samples for the assumption checks");
    cmd->add_option("--radius", f.radius, "Sampling ball radius");
    cmd->add_option("--window", f.window, "Trailing fraction of [0, T] used by the decay fit");
    cmd->add_option("--out", f.out, "Output directory for moments.csv / report.txt / report.json");
}

ExperimentConfig build_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_file.empty()) cfg = ExperimentConfig::from_json_file(f.config_file);
    if (!f.preset.empty()) {
        cfg.preset_name = f.preset;
        cfg.inline_bounds.reset();
    }
    if (!f.scheme.empty()) {
        if (f.scheme == "em")
            cfg.scheme = stabilab::SchemeConfig::em();
        else if (f.scheme == "theta")
            cfg.scheme = stabilab::SchemeConfig::theta_em(f.theta >= 0.0 ? f.theta : 0.5);
        else if (f.scheme == "mtem") {
            cfg.scheme = stabilab::SchemeConfig{};
            cfg.scheme.kind = stabilab::SchemeKind::MTEM;
        } else
            throw stabilab::InputError("--scheme must be one of em | theta | mtem");
    } else if (f.theta >= 0.0) {
        cfg.scheme = stabilab::SchemeConfig::theta_em(f.theta);
    }
    if (f.scheme == "theta" && f.theta >= 0.0) cfg.scheme.theta = f.theta;
    if (f.mbar > 0) cfg.m_bar = f.mbar;
    if (f.steps >= 0) cfg.n_steps = f.steps;
    if (f.paths >= 0) cfg.n_paths = f.paths;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (f.samples > 0) cfg.check_samples = f.samples;
    if (f.radius > 0) cfg.check_radius = f.radius;
    if (f.window > 0) cfg.window = f.window;
    if (!f.out.empty()) cfg.out_dir = f.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stabilab: mean-square stability laboratory for SDDE schemes"};
    app.require_subcommand(1);

    CommonFlags simf, certf, checkf;
    auto* sim = app.add_subcommand("simulate", "Certify, run the ensemble, fit the decay rate");
    add_common_flags(sim, simf);
    auto* cert = app.add_subcommand("certify", "Coefficient-matrix certificates only");
    add_common_flags(cert, certf);
    auto* check = app.add_subcommand("check", "Assumption sampling and truncation-lemma checks");
    add_common_flags(check, checkf);

    std::string fit_csv;
    double fit_window = 0.5;
    auto* fit = app.add_subcommand("fit", "Fit a decay rate to an existing moments.csv");
    fit->add_option("csv", fit_csv, "moments.csv produced by simulate")->required();
    fit->add_option("--window", fit_window, "Trailing fraction of [0, T]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto cfg = build_config(simf);
            const auto result = stabilab::run(cfg);
            std::cout << stabilab::render_run_text(result, cfg);
            if (!result.moments_csv_path.empty())
                std::cout << "wrote " << result.moments_csv_path << ", "
                          << result.report_txt_path << ", " << result.report_json_path << "\n";
        } else if (cert->parsed()) {
            const auto cfg = build_config(certf);
            const auto result = stabilab::run_certify(cfg);
            std::cout << stabilab::render_certify_text(result.certify, result.system_name);
        } else if (check->parsed()) {
            const auto cfg = build_config(checkf);
            const auto result = stabilab::run_check(cfg);
            std::cout << result.report_text;
        } else if (fit->parsed()) {
            const auto series = stabilab::read_moments_csv_file(fit_csv);
            const auto f = stabilab::fit_decay_rate(series, fit_window);
            std::printf("lambda = %.10g\nstderr = %.10g\npoints = %lld\n", f.lambda, f.stderror,
                        static_cast<long long>(f.n_points));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
