#include "stabilab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stabilab/csv.hpp"

namespace stabilab {

using nlohmann::json;

double parse_config_number(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const double num = std::stod(text.substr(0, slash));
            const double den = std::stod(text.substr(slash + 1));
            if (den == 0.0) throw InputError("config number: zero denominator in '" + text + "'");
            return num / den;
        }
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error&) {
        throw InputError("config number: cannot parse '" + text + "'");
    }
}

namespace {

double jnum(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_config_number(j.get<std::string>());
    throw InputError(std::string("config: ") + what + " must be a number or numeric string");
}

std::int64_t jint(const json& j, const char* what) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    const double v = jnum(j, what);
    const auto r = static_cast<std::int64_t>(v);
    if (static_cast<double>(r) != v)
        throw InputError(std::string("config: ") + what + " must be an integer");
    return r;
}

Vec jvec(const json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string("config: ") + what + " must be an array");
    Vec v;
    for (const auto& e : j) v.push_back(jnum(e, what));
    return v;
}

Mat jmat(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw InputError(std::string("config: ") + what + " must be a nonempty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const Vec row = jvec(j[i], what);
        if (static_cast<int>(row.size()) != cols)
            throw InputError(std::string("config: ragged matrix in ") + what);
        for (int c = 0; c < cols; ++c) m(i, c) = row[c];
    }
    return m;
}

void apply_scheme_json(ExperimentConfig& cfg, const json& j) {
    std::string kind;
    if (j.is_string()) {
        kind = j.get<std::string>();
    } else if (j.is_object()) {
        kind = j.value("kind", "em");
    } else {
        throw InputError("config: scheme must be a string or object");
    }
    if (kind == "em") {
        cfg.scheme = SchemeConfig::em();
    } else if (kind == "theta") {
        double theta = 0.5;
        if (j.is_object() && j.contains("theta")) theta = jnum(j["theta"], "scheme.theta");
        cfg.scheme = SchemeConfig::theta_em(theta);
    } else if (kind == "mtem") {
        cfg.scheme = SchemeConfig{};
        cfg.scheme.kind = SchemeKind::MTEM;
        if (j.is_object() && j.contains("truncation")) {
            const auto& t = j["truncation"];
            TruncationConfig tc;
            tc.h0 = t.contains("h0") ? jnum(t["h0"], "truncation.h0") : 1.0;
            tc.gamma = t.contains("gamma") ? jnum(t["gamma"], "truncation.gamma") : 0.25;
            tc.delta_star =
                t.contains("delta_star") ? jnum(t["delta_star"], "truncation.delta_star") : 1.0;
            cfg.scheme.truncation = tc;  // admissibility re-checked against the model at run time
        }
    } else {
        throw InputError("config: scheme kind must be one of em | theta | mtem");
    }
    if (j.is_object()) {
        if (j.contains("implicit_tol")) cfg.scheme.implicit_tol = jnum(j["implicit_tol"], "tol");
        if (j.contains("implicit_max_iter"))
            cfg.scheme.implicit_max_iter = static_cast<int>(jint(j["implicit_max_iter"], "iters"));
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    if (j.contains("system")) {
        const auto& s = j["system"];
        if (s.is_string()) {
            cfg.preset_name = s.get<std::string>();
        } else if (s.is_object()) {
            cfg.preset_name.clear();
            cfg.inline_bounds = CoeffBounds(jmat(s.at("A"), "system.A"), jmat(s.at("B"), "system.B"));
            cfg.inline_tau_max = s.contains("tau_max") ? jnum(s["tau_max"], "system.tau_max") : 0.0;
        } else {
            throw InputError("config: system must be a preset name or an object with A and B");
        }
    }
    if (j.contains("scheme")) apply_scheme_json(cfg, j["scheme"]);
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (g.contains("m_bar")) cfg.m_bar = jint(g["m_bar"], "grid.m_bar");
        if (g.contains("steps")) cfg.n_steps = jint(g["steps"], "grid.steps");
    }
    if (j.contains("initial")) {
        const auto& init = j["initial"];
        if (init.is_array()) {
            cfg.initial_constant = jvec(init, "initial");
        } else if (init.is_object() && init.contains("constant")) {
            cfg.initial_constant = jvec(init["constant"], "initial.constant");
        } else if (init.is_object() && init.contains("name")) {
            const auto name = init["name"].get<std::string>();
            if (name == "zero")
                cfg.initial_constant = Vec{};  // resolved against dimension later
            else
                throw InputError("config: unknown named initial function '" + name + "'");
        } else {
            throw InputError("config: initial must be an array, {constant: [...]}, or {name: ...}");
        }
    }
    if (j.contains("paths")) cfg.n_paths = jint(j["paths"], "paths");
    if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(jint(j["seed"], "seed"));
    if (j.contains("window")) cfg.window = jnum(j["window"], "window");
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("check")) {
        const auto& c = j["check"];
        if (c.contains("samples")) cfg.check_samples = jint(c["samples"], "check.samples");
        if (c.contains("radius")) cfg.check_radius = jnum(c["radius"], "check.radius");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_json_text(ss.str());
}

int env_thread_cap() {
    const char* v = std::getenv("STABILAB_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1)
        throw ConfigError(std::string("STABILAB_THREADS must be a positive integer, got '") + v +
                          "'");
    return static_cast<int>(n);
}

CertifySummary certify_bounds(const CoeffBounds& bounds, double tau_max, const Vec& claimed_p,
                              double claimed_epsilon) {
    CertifySummary s;
    s.khasminskii = khasminskii_diagnostic(bounds);
    s.growth_K = growth_constant(bounds);

    const int d = bounds.dim();
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = bounds.A(i, j) + bounds.B(i, j);
    s.abscissa = spectral_abscissa(m);

    s.outcome = find_certificate(bounds);
    if (auto* cert = std::get_if<Certificate>(&s.outcome); cert && tau_max > 0.0)
        cert->beta = decay_rate(bounds, cert->p, tau_max);

    s.claimed_p = claimed_p;
    s.claimed_epsilon = claimed_epsilon;
    if (!claimed_p.empty()) s.claimed_margins = verify_certificate(bounds, claimed_p);

    bool diag_negative = true;
    double min_abs = std::numeric_limits<double>::infinity(), max_abs = 0.0;
    for (int i = 0; i < d; ++i) {
        if (!(bounds.A(i, i) < 0.0)) diag_negative = false;
        min_abs = std::min(min_abs, std::fabs(bounds.A(i, i)));
        max_abs = std::max(max_abs, std::fabs(bounds.A(i, i)));
    }
    if (diag_negative) {
        s.theta_epsilon_bound = min_abs / (d * max_abs);
        const double eps = (claimed_epsilon > 0.0 && claimed_epsilon < s.theta_epsilon_bound)
                               ? claimed_epsilon
                               : 0.5 * s.theta_epsilon_bound;
        if (!claimed_p.empty() && claimed_epsilon > 0.0 &&
            claimed_epsilon < s.theta_epsilon_bound)
            s.claimed_theta = check_theta_condition(bounds, claimed_p, claimed_epsilon);
        s.theta_outcome = find_theta_certificate(bounds, eps);
    }
    return s;
}

namespace {

struct ResolvedSystem {
    std::string name;
    SddeSystem system;
    CoeffBounds bounds;
    InitialSegment initial;
    Vec claimed_p;
    double claimed_epsilon = 0.0;
    bool simulatable = false;
};

ResolvedSystem resolve_system(const ExperimentConfig& cfg) {
    if (!cfg.preset_name.empty()) {
        Preset p = preset(cfg.preset_name);
        ResolvedSystem r{p.name,      std::move(p.system), std::move(p.bounds),
                         p.initial,   p.claimed_p,         p.claimed_epsilon,
                         true};
        if (cfg.initial_constant) {
            Vec v = *cfg.initial_constant;
            if (v.empty()) v.assign(r.system.d, 0.0);  // named "zero"
            if (static_cast<int>(v.size()) != r.system.d)
                throw InputError("initial vector length does not match system dimension");
            r.initial = InitialSegment::constant(std::move(v));
        }
        return r;
    }
    if (!cfg.inline_bounds) throw ConfigError("no system configured");
    ResolvedSystem r{"inline",
                     SddeSystem{},
                     *cfg.inline_bounds,
                     InitialSegment::zero(cfg.inline_bounds->dim()),
                     {},
                     0.0,
                     false};
    return r;
}

int resolve_threads(const ExperimentConfig& cfg) {
    return cfg.threads > 0 ? cfg.threads : env_thread_cap();
}

std::string fmt(double v, int digits = 10) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fmt_vec(const Vec& v, int digits = 10) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i], digits);
    }
    return out + ")";
}

json vec_json(const Vec& v) { return json(v); }

json certify_json(const CertifySummary& s) {
    json j;
    j["khasminskii"] = {{"feasible", s.khasminskii.feasible},
                        {"S_a", vec_json(s.khasminskii.col_sums_a)},
                        {"S_b", vec_json(s.khasminskii.col_sums_b)}};
    j["growth_K"] = s.growth_K;
    j["spectral_abscissa"] = s.abscissa;
    if (const auto* cert = std::get_if<Certificate>(&s.outcome)) {
        j["certificate"] = {{"feasible", true},
                            {"p", vec_json(cert->p)},
                            {"margins", vec_json(cert->margins)},
                            {"beta", cert->beta}};
    } else {
        j["certificate"] = {{"feasible", false},
                            {"spectral_abscissa", std::get<Infeasible>(s.outcome).spectral_abscissa}};
    }
    if (s.claimed_margins) {
        j["claimed"] = {{"p", vec_json(s.claimed_p)},
                        {"margins", vec_json(s.claimed_margins->margins)},
                        {"feasible", s.claimed_margins->feasible}};
    }
    if (s.theta_epsilon_bound > 0.0) {
        j["theta_condition"] = {{"epsilon_bound", s.theta_epsilon_bound},
                                {"epsilon", s.claimed_epsilon}};
        if (s.claimed_theta) {
            j["theta_condition"]["claimed_margins"] = vec_json(s.claimed_theta->margins);
            j["theta_condition"]["claimed_feasible"] = s.claimed_theta->feasible;
        }
        if (s.theta_outcome) {
            if (const auto* tc = std::get_if<Certificate>(&*s.theta_outcome)) {
                j["theta_condition"]["certificate"] = {{"feasible", true},
                                                       {"p", vec_json(tc->p)},
                                                       {"margins", vec_json(tc->margins)}};
            } else {
                j["theta_condition"]["certificate"] = {
                    {"feasible", false},
                    {"spectral_abscissa",
                     std::get<Infeasible>(*s.theta_outcome).spectral_abscissa}};
            }
        }
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open for writing: " + path);
    f << text;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

}  // namespace

std::string render_certify_text(const CertifySummary& s, const std::string& system_name) {
    std::ostringstream os;
    os << "== certificates: " << system_name << " ==\n";
    os << "khasminskii diagnostic: " << (s.khasminskii.feasible ? "possibly feasible" : "infeasible")
       << "\n  column sums S_a = " << fmt_vec(s.khasminskii.col_sums_a)
       << ", S_b = " << fmt_vec(s.khasminskii.col_sums_b) << "\n";
    os << "growth constant K = " << fmt(s.growth_K) << "\n";
    os << "spectral abscissa of A+B = " << fmt(s.abscissa) << "\n";
    if (const auto* cert = std::get_if<Certificate>(&s.outcome)) {
        os << "certificate: found\n  p = " << fmt_vec(cert->p)
           << "\n  margins = " << fmt_vec(cert->margins) << "\n  decay rate beta = "
           << fmt(cert->beta) << "\n";
    } else {
        os << "certificate: infeasible (spectral abscissa = "
           << fmt(std::get<Infeasible>(s.outcome).spectral_abscissa) << " >= 0)\n";
    }
    if (s.claimed_margins) {
        os << "claimed weights p = " << fmt_vec(s.claimed_p)
           << "\n  margins as computed = " << fmt_vec(s.claimed_margins->margins) << "\n  verdict: "
           << (s.claimed_margins->feasible ? "feasible" : "infeasible") << "\n";
    }
    if (s.theta_epsilon_bound > 0.0) {
        os << "theta condition: epsilon bound = " << fmt(s.theta_epsilon_bound);
        if (s.claimed_epsilon > 0.0) os << ", epsilon = " << fmt(s.claimed_epsilon);
        os << "\n";
        if (s.claimed_theta) {
            os << "  claimed p margins = " << fmt_vec(s.claimed_theta->margins) << " -> "
               << (s.claimed_theta->feasible ? "feasible" : "infeasible") << "\n";
        }
        if (s.theta_outcome) {
            if (const auto* tc = std::get_if<Certificate>(&*s.theta_outcome)) {
                os << "  epsilon-condition certificate: p = " << fmt_vec(tc->p)
                   << ", margins = " << fmt_vec(tc->margins) << "\n";
            } else {
                os << "  epsilon-condition certificate: infeasible (abscissa = "
                   << fmt(std::get<Infeasible>(*s.theta_outcome).spectral_abscissa) << ")\n";
            }
        }
    }
    return os.str();
}

namespace {

std::string scheme_label(const SchemeConfig& s) {
    switch (s.kind) {
        case SchemeKind::EM:
            return "em";
        case SchemeKind::ThetaEM:
            return "theta(" + fmt(s.theta, 6) + ")";
        case SchemeKind::MTEM:
            return "mtem";
    }
    return "?";
}

}  // namespace

std::string render_run_text(const RunResult& r, const ExperimentConfig& config) {
    std::ostringstream os;
    os << "stabilab simulate: system = " << r.system_name << ", scheme = "
       << scheme_label(config.scheme) << "\n";
    os << "grid: m_bar = " << config.m_bar << ", delta = " << fmt(r.series.delta)
       << ", steps = " << config.n_steps << ", paths = " << config.n_paths
       << ", seed = " << config.seed << "\n\n";

    os << "== componentwise bound sampling ==\n";
    os << "samples = " << r.diagnostics.n_samples << ", radius = " << fmt(r.diagnostics.radius)
       << ", violations = " << r.diagnostics.violations.size() << "\n\n";

    os << render_certify_text(r.certify, r.system_name) << "\n";

    if (r.drift_linear_K) {
        os << "drift linear growth: |f(x,y)| <= K(|x|+|y|) with K = " << fmt(*r.drift_linear_K)
           << " (row sums); theta in [0, 1/2] theorem applicable\n\n";
    } else if (config.scheme.kind == SchemeKind::ThetaEM && config.scheme.theta <= 0.5) {
        os << "drift linear growth: no constant available; theta in [0, 1/2] theorem not "
              "applicable to this system\n\n";
    }
    if (config.scheme.kind == SchemeKind::MTEM) {
        os << "truncation: h0 = " << fmt(r.truncation.h0) << ", gamma = " << fmt(r.truncation.gamma)
           << ", h(delta) = " << fmt(r.truncation.h_of(r.series.delta)) << "\n\n";
    }

    os << "== ensemble ==\n";
    os << "weights used for V: " << fmt_vec(r.weights_used) << "\n";
    os << "paths = " << r.series.n_paths << ", diverged = " << r.series.n_diverged << "\n";
    os << "V(0) = " << fmt(r.series.weighted[r.series.m_bar])
       << ", V(T) = " << fmt(r.series.weighted.back()) << "\n";
    os << "fitted decay rate lambda = " << fmt(r.fit.lambda) << " +/- " << fmt(r.fit.stderror)
       << " (window start t = " << fmt(r.fit.window_start) << ", " << r.fit.n_points
       << " points)\n";
    return os.str();
}

RunResult run(const ExperimentConfig& config) {
    ResolvedSystem sysres = resolve_system(config);
    if (!sysres.simulatable)
        throw ConfigError("simulate requires a preset system (inline matrices carry no drift)");
    const SddeSystem& sys = sysres.system;
    const int threads = resolve_threads(config);

    if (config.n_paths < 1) throw InputError("paths must be >= 1");
    if (config.n_steps < 1) throw InputError("steps must be >= 1");
    const GridSpec grid =
        GridSpec::from_delay_steps(sys.delay.tau_max, config.m_bar, config.n_steps);

    RunResult r;
    r.system_name = sysres.name;
    r.diagnostics = check_componentwise_bound(sys, sysres.bounds, config.check_samples,
                                              config.check_radius, config.seed, threads);
    r.certify =
        certify_bounds(sysres.bounds, sys.delay.tau_max, sysres.claimed_p, sysres.claimed_epsilon);
    if (sys.lipschitz_model) r.drift_linear_K = sys.lipschitz_model->drift_linear_K;

    SchemeConfig scheme = config.scheme;
    if (scheme.kind == SchemeKind::MTEM) {
        if (scheme.truncation)
            r.truncation = TruncationConfig::checked(scheme.truncation->h0, scheme.truncation->gamma,
                                                     scheme.truncation->delta_star,
                                                     sys.lipschitz_model);
        else
            r.truncation = TruncationConfig::for_model(sys.lipschitz_model);
        scheme.truncation = r.truncation;
    }

    if (const auto* cert = std::get_if<Certificate>(&r.certify.outcome))
        r.weights_used = cert->p;
    else
        r.weights_used.assign(sys.d, 1.0);

    r.series = ensemble_moments(sys, scheme, grid, sysres.initial, config.n_paths, config.seed,
                                r.weights_used, threads);
    r.fit = fit_decay_rate(r.series, config.window);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        const auto dir = std::filesystem::path(config.out_dir);
        r.moments_csv_path = (dir / "moments.csv").string();
        r.report_txt_path = (dir / "report.txt").string();
        r.report_json_path = (dir / "report.json").string();
        write_moments_csv_file(r.moments_csv_path, r.series);
        write_text_file(r.report_txt_path, render_run_text(r, config));

        json j;
        j["system"] = r.system_name;
        j["scheme"] = scheme_label(config.scheme);
        j["grid"] = {{"m_bar", config.m_bar},
                     {"delta", r.series.delta},
                     {"steps", config.n_steps},
                     {"horizon", grid.horizon}};
        j["certify"] = certify_json(r.certify);
        j["sampling_check"] = {{"samples", r.diagnostics.n_samples},
                               {"radius", r.diagnostics.radius},
                               {"violations", r.diagnostics.violations.size()}};
        if (r.drift_linear_K) j["drift_linear_K"] = *r.drift_linear_K;
        if (config.scheme.kind == SchemeKind::MTEM)
            j["truncation"] = {{"h0", r.truncation.h0},
                               {"gamma", r.truncation.gamma},
                               {"delta_star", r.truncation.delta_star},
                               {"h_at_delta", r.truncation.h_of(r.series.delta)}};
        j["ensemble"] = {{"paths", r.series.n_paths},
                         {"diverged", r.series.n_diverged},
                         {"weights", vec_json(r.weights_used)},
                         {"V_initial", r.series.weighted[r.series.m_bar]},
                         {"V_terminal", r.series.weighted.back()}};
        j["fit"] = {{"lambda", r.fit.lambda},
                    {"stderr", r.fit.stderror},
                    {"points", r.fit.n_points},
                    {"window", config.window}};
        write_json_file(r.report_json_path, j);
    }
    return r;
}

CertifyRunResult run_certify(const ExperimentConfig& config) {
    ResolvedSystem sysres = resolve_system(config);
    const double tau =
        sysres.simulatable ? sysres.system.delay.tau_max : config.inline_tau_max;
    CertifyRunResult r;
    r.system_name = sysres.name;
    r.certify = certify_bounds(sysres.bounds, tau, sysres.claimed_p, sysres.claimed_epsilon);
    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        const auto dir = std::filesystem::path(config.out_dir);
        r.report_txt_path = (dir / "report.txt").string();
        r.report_json_path = (dir / "report.json").string();
        write_text_file(r.report_txt_path, render_certify_text(r.certify, r.system_name));
        json j;
        j["system"] = r.system_name;
        j["certify"] = certify_json(r.certify);
        write_json_file(r.report_json_path, j);
    }
    return r;
}

CheckRunResult run_check(const ExperimentConfig& config) {
    ResolvedSystem sysres = resolve_system(config);
    if (!sysres.simulatable)
        throw ConfigError("check requires a preset system (inline matrices carry no drift)");
    const SddeSystem& sys = sysres.system;
    const int threads = resolve_threads(config);
    const GridSpec grid = GridSpec::from_delay_steps(sys.delay.tau_max, config.m_bar, 1);

    CheckRunResult r;
    r.system_name = sysres.name;
    r.diagnostics = check_componentwise_bound(sys, sysres.bounds, config.check_samples,
                                              config.check_radius, config.seed, threads);
    const TruncationConfig trunc = TruncationConfig::for_model(sys.lipschitz_model);
    r.lemmas = check_truncation_lemmas(sys, sysres.bounds, trunc, grid.delta, config.check_samples,
                                       config.seed, threads);

    std::ostringstream os;
    os << "stabilab check: system = " << r.system_name << "\n";
    os << "componentwise bound: " << r.diagnostics.violations.size() << " violations in "
       << r.diagnostics.n_samples << " samples (radius " << fmt(r.diagnostics.radius) << ")\n";
    if (!r.diagnostics.violations.empty()) {
        const auto& v = r.diagnostics.violations.front();
        os << "  first violation: sample " << v.sample_index << ", row " << (v.row + 1)
           << ", lhs = " << fmt(v.lhs) << " > rhs = " << fmt(v.rhs) << "\n";
    }
    os << "truncation lemmas at delta = " << fmt(grid.delta) << " (h = " << fmt(r.lemmas.h)
       << ", L_h = " << fmt(r.lemmas.lipschitz_at_h) << "): " << r.lemmas.violations.size()
       << " violations in " << r.lemmas.n_samples << " samples, " << r.lemmas.n_outside
       << " outside the ball\n";
    r.report_text = os.str();

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        const auto dir = std::filesystem::path(config.out_dir);
        r.report_txt_path = (dir / "report.txt").string();
        r.report_json_path = (dir / "report.json").string();
        write_text_file(r.report_txt_path, r.report_text);
        json j;
        j["system"] = r.system_name;
        j["sampling_check"] = {{"samples", r.diagnostics.n_samples},
                               {"radius", r.diagnostics.radius},
                               {"violations", r.diagnostics.violations.size()}};
        j["truncation_check"] = {{"samples", r.lemmas.n_samples},
                                 {"outside", r.lemmas.n_outside},
                                 {"h", r.lemmas.h},
                                 {"lipschitz_at_h", r.lemmas.lipschitz_at_h},
                                 {"violations", r.lemmas.violations.size()}};
        write_json_file(r.report_json_path, j);
    }
    return r;
}

}  // namespace stabilab
