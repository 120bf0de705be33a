#include "stabilab/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stabilab/rng.hpp"

namespace stabilab {

double TruncationConfig::h_of(double delta) const {
    if (!(delta > 0.0) || delta > delta_star) {
        std::ostringstream msg;
        msg << "truncation: delta must lie in (0, " << delta_star << "], got " << delta;
        throw InputError(msg.str());
    }
    return h0 * std::pow(delta, -gamma);
}

double h_of_delta(const TruncationConfig& config, double delta) { return config.h_of(delta); }

TruncationConfig TruncationConfig::checked(double h0, double gamma, double delta_star,
                                           const std::optional<LipschitzModel>& model) {
    if (!(h0 > 0.0)) throw InputError("truncation: h0 must be > 0");
    if (!(gamma > 0.0)) throw InputError("truncation: gamma must be > 0");
    if (!(delta_star > 0.0)) throw InputError("truncation: delta_star must be > 0");
    if (model && model->kind == LipschitzModel::Kind::Polynomial && model->q > 0.0) {
        const double limit = 1.0 / (2.0 * model->q);
        if (gamma >= limit) {
            std::ostringstream msg;
            msg << "truncation: gamma = " << gamma << " must be < 1/(2q) = " << limit
                << " so that L_h(delta)^2 * delta vanishes with the stepsize";
            throw InputError(msg.str());
        }
    }
    return TruncationConfig{h0, gamma, delta_star};
}

TruncationConfig TruncationConfig::for_model(const std::optional<LipschitzModel>& model,
                                             double h0, double delta_star) {
    double gamma = 0.25;
    if (model && model->kind == LipschitzModel::Kind::Polynomial && model->q > 0.0)
        gamma = 1.0 / (4.0 * model->q);
    return checked(h0, gamma, delta_star, model);
}

void truncate_apply(const std::function<void(std::span<const double>, std::span<const double>,
                                             std::span<double>)>& coeff,
                    double h, std::span<const double> x, std::span<const double> y,
                    std::span<double> out) {
    if (!(h > 0.0)) throw InputError("truncate_apply: h must be > 0");
    const double big = std::max(norm2(x), norm2(y));
    if (big <= h) {
        coeff(x, y, out);
        return;
    }
    const double shrink = h / big;
    Vec xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = shrink * x[i];
    for (std::size_t i = 0; i < y.size(); ++i) ys[i] = shrink * y[i];
    coeff(xs, ys, out);
    const double grow = big / h;
    for (double& v : out) v *= grow;
}

TruncationCheckReport check_truncation_lemmas(const SddeSystem& sys, const CoeffBounds& bounds,
                                              const TruncationConfig& config, double delta,
                                              std::int64_t n_samples, std::uint64_t seed,
                                              int threads) {
    if (!sys.lipschitz_model)
        throw ConfigError("check_truncation_lemmas: the system has no Lipschitz model");
    if (n_samples < 1) throw InputError("check_truncation_lemmas: n_samples must be >= 1");
    if (bounds.dim() != sys.d)
        throw InputError("check_truncation_lemmas: bounds dimension does not match system");

    const int d = sys.d;
    const double h = config.h_of(delta);
    const double lip = sys.lipschitz_model->lipschitz_at(h);

    TruncationCheckReport rep;
    rep.n_samples = n_samples;
    rep.h = h;
    rep.lipschitz_at_h = lip;

    std::vector<std::vector<LemmaViolation>> found(static_cast<std::size_t>(n_samples));
    std::vector<unsigned char> outside(static_cast<std::size_t>(n_samples), 0);
    std::exception_ptr err;

#ifdef _OPENMP
    int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
    int nthreads = 1;
    (void)threads;
#endif

#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (std::int64_t s = 0; s < n_samples; ++s) {
        try {
            // Even samples stay inside the ball (identity branch); odd samples
            // draw from a ball of radius 4h and mostly land outside.
            const double r = (s % 2 == 0) ? h : 4.0 * h;
            Vec x(d), y(d), f(d);
            Mat g(d, sys.m);
            rng::uniform_in_ball(seed, static_cast<std::uint64_t>(s), 0, r, x);
            rng::uniform_in_ball(seed, static_cast<std::uint64_t>(s), 1, r, y);
            const double big = std::max(norm2(x), norm2(y));
            outside[static_cast<std::size_t>(s)] = big > h ? 1 : 0;

            truncate_apply(sys.drift, h, x, y, f);
            truncate_apply(sys.diffusion, h, x, y, g.data());
            if (!all_finite(f) || !all_finite(g.data())) {
                std::ostringstream msg;
                msg << "non-finite truncated coefficient at sample " << s;
                throw EvaluationError(msg.str());
            }

            auto& sink = found[static_cast<std::size_t>(s)];
            for (int i = 0; i < d; ++i) {
                double lhs = 2.0 * x[i] * f[i];
                for (int l = 0; l < sys.m; ++l) lhs += g(i, l) * g(i, l);
                double rhs = 0.0;
                for (int j = 0; j < d; ++j)
                    rhs += bounds.A(i, j) * x[j] * x[j] + bounds.B(i, j) * y[j] * y[j];
                const double slack = 1e-9 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
                if (lhs > rhs + slack) sink.push_back({s, 1, i, lhs, rhs});
            }

            const double growth = lip * (norm2(x) + norm2(y));
            const double fg = std::max(norm2(f), norm2(g.data()));
            if (fg > growth + 1e-9 * std::max(1.0, growth)) sink.push_back({s, 2, 0, fg, growth});
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    for (auto& per_sample : found)
        for (auto& v : per_sample) rep.violations.push_back(std::move(v));
    for (unsigned char o : outside) rep.n_outside += o;
    return rep;
}

}  // namespace stabilab
