#pragma once

#include <optional>
#include <string>

#include "stabilab/certify.hpp"
#include "stabilab/montecarlo.hpp"
#include "stabilab/presets.hpp"
#include "stabilab/truncation.hpp"

namespace stabilab {

/// One experiment: which system, which scheme, grid, ensemble size, outputs.
/// Built from a JSON config file and/or CLI flags; flags win.
struct ExperimentConfig {
    std::string preset_name = "example1";
    std::optional<CoeffBounds> inline_bounds;  // certify-only systems
    double inline_tau_max = 0.0;

    SchemeConfig scheme = SchemeConfig::em();
    std::int64_t m_bar = 10;
    std::int64_t n_steps = 2000;
    std::int64_t n_paths = 500;
    std::uint64_t seed = 42;
    double window = 0.5;
    std::optional<Vec> initial_constant;  // overrides preset suggestion

    std::int64_t check_samples = 2000;
    double check_radius = 10.0;

    std::string out_dir;  // empty: do not write files
    int threads = 0;      // 0: STABILAB_THREADS or OpenMP default

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

/// Numeric fields in config files may be JSON numbers, decimal strings, or
/// exact rationals written "numerator/denominator".
double parse_config_number(const std::string& text);

/// Worker cap from STABILAB_THREADS (0 = use the implementation default).
int env_thread_cap();

/// Certificate pipeline output for one coefficient pair.
struct CertifySummary {
    KhasminskiiDiagnostic khasminskii;
    double growth_K = 1.0;
    double abscissa = 0.0;       // spectral abscissa of A + B
    CertificateOutcome outcome;  // beta filled in when feasible
    Vec claimed_p;               // empty when no claim accompanies the system
    std::optional<MarginReport> claimed_margins;
    double claimed_epsilon = 0.0;
    double theta_epsilon_bound = 0.0;
    std::optional<ThetaConditionReport> claimed_theta;   // claimed p at claimed epsilon
    std::optional<CertificateOutcome> theta_outcome;     // search on the epsilon-scaled matrix
};

CertifySummary certify_bounds(const CoeffBounds& bounds, double tau_max, const Vec& claimed_p,
                              double claimed_epsilon);

struct RunResult {
    std::string system_name;
    CertifySummary certify;
    DiagnosticsReport diagnostics;      // sampled componentwise-bound check
    std::optional<double> drift_linear_K;
    TruncationConfig truncation;        // resolved config (MTEM runs)
    MomentSeries series;
    DecayFit fit;
    Vec weights_used;
    // Empirical almost-sure check: worst terminal log|X_N^i| / T over a small
    // sample of paths (negative means every sampled path decayed).
    double pathwise_exponent_max = 0.0;
    std::int64_t pathwise_sampled = 0;
    std::string moments_csv_path;
    std::string report_txt_path;
    std::string report_json_path;
};

/// Full pipeline: diagnostics, certificates, ensemble, decay fit, emission.
RunResult run(const ExperimentConfig& config);

/// Certification-only pipeline (no simulation); works for inline matrices.
struct CertifyRunResult {
    std::string system_name;
    CertifySummary certify;
    std::string report_txt_path;
    std::string report_json_path;
};
CertifyRunResult run_certify(const ExperimentConfig& config);

/// Assumption sampling plus truncation-lemma checks.
struct CheckRunResult {
    std::string system_name;
    DiagnosticsReport diagnostics;
    TruncationCheckReport lemmas;
    std::string report_text;
    std::string report_txt_path;
    std::string report_json_path;
};
CheckRunResult run_check(const ExperimentConfig& config);

std::string render_certify_text(const CertifySummary& s, const std::string& system_name);
std::string render_run_text(const RunResult& r, const ExperimentConfig& config);

}  // namespace stabilab
