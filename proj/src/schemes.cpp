#include "stabilab/schemes.hpp"

#include <cmath>
#include <sstream>

namespace stabilab {

SchemeConfig SchemeConfig::theta_em(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("theta must lie in [0, 1]");
    SchemeConfig c;
    c.kind = SchemeKind::ThetaEM;
    c.theta = theta;
    return c;
}

SchemeConfig SchemeConfig::mtem(TruncationConfig config) {
    SchemeConfig c;
    c.kind = SchemeKind::MTEM;
    c.truncation = config;
    return c;
}

PathState::PathState(int d, std::int64_t m_bar) : d_(d), m_bar_(m_bar) {
    if (d < 1) throw InputError("PathState: dimension must be >= 1");
    if (m_bar < 1) throw InputError("PathState: m_bar must be >= 1");
    ring_.assign(static_cast<std::size_t>(m_bar + 1) * d, 0.0);
}

PathState PathState::with_history(int d, std::int64_t m_bar, const std::vector<Vec>& states) {
    PathState s(d, m_bar);
    if (static_cast<std::int64_t>(states.size()) != m_bar + 1)
        throw InputError("PathState: history must contain exactly m_bar + 1 states");
    for (std::int64_t i = 0; i <= m_bar; ++i) s.set_history_entry(i - m_bar, states[i]);
    return s;
}

std::span<double> PathState::slot(std::int64_t idx) {
    const std::int64_t len = m_bar_ + 1;
    const std::int64_t r = ((idx % len) + len) % len;
    return {ring_.data() + r * d_, static_cast<std::size_t>(d_)};
}

std::span<const double> PathState::state_at(std::int64_t idx) const {
    if (idx > k_ || idx < k_ - m_bar_) {
        std::ostringstream msg;
        msg << "PathState: index " << idx << " outside window [" << (k_ - m_bar_) << ", " << k_
            << "]";
        throw std::out_of_range(msg.str());
    }
    const std::int64_t len = m_bar_ + 1;
    const std::int64_t r = ((idx % len) + len) % len;
    return {ring_.data() + r * d_, static_cast<std::size_t>(d_)};
}

void PathState::set_history_entry(std::int64_t k, std::span<const double> value) {
    if (k_ != 0) throw InputError("PathState: history can only be written before stepping");
    if (k < -m_bar_ || k > 0) throw InputError("PathState: history index outside [-m_bar, 0]");
    if (static_cast<int>(value.size()) != d_) throw InputError("PathState: state length mismatch");
    auto dst = slot(k);
    std::copy(value.begin(), value.end(), dst.begin());
}

void PathState::push(std::span<const double> next) {
    if (static_cast<int>(next.size()) != d_) throw InputError("PathState: state length mismatch");
    ++k_;
    auto dst = slot(k_);
    std::copy(next.begin(), next.end(), dst.begin());
}

std::int64_t lag_index(const DelayFunction& delay, std::int64_t k, double delta) {
    if (k < 0) throw InputError("lag_index: step index must be >= 0");
    if (!(delta > 0.0)) throw InputError("lag_index: delta must be > 0");
    const double t = static_cast<double>(k) * delta;
    const double tau = delay.evaluate(t);
    if (!std::isfinite(tau) || !(tau > 0.0) || tau > delay.tau_max) {
        std::ostringstream msg;
        msg << "delay evaluated to " << tau << " at t = " << t << ", outside (0, "
            << delay.tau_max << "]";
        throw ModelViolationError(msg.str());
    }
    const double ratio = tau / delta;
    const double snapped = std::round(ratio);
    if (std::fabs(ratio - snapped) <= 1e-9) return static_cast<std::int64_t>(snapped);
    return static_cast<std::int64_t>(std::floor(ratio));
}

void Trajectory::reset(int dim, const GridSpec& grid) {
    d = dim;
    m_bar = grid.m_bar;
    n_steps = grid.n_steps;
    delta = grid.delta;
    data.assign(static_cast<std::size_t>(n_steps + m_bar + 1) * d, 0.0);
}

std::span<const double> Trajectory::state(std::int64_t k) const {
    if (k < -m_bar || k > n_steps) throw std::out_of_range("Trajectory: index outside [-m_bar, n_steps]");
    return {data.data() + (k + m_bar) * d, static_cast<std::size_t>(d)};
}

std::span<double> Trajectory::state_mut(std::int64_t k) {
    if (k < -m_bar || k > n_steps) throw std::out_of_range("Trajectory: index outside [-m_bar, n_steps]");
    return {data.data() + (k + m_bar) * d, static_cast<std::size_t>(d)};
}

// ---------------------------------------------------------------------------

struct PathIntegrator::Impl {
    const SddeSystem& sys;
    SchemeConfig scheme;
    double delta;
    double trunc_h = 0.0;  // truncation radius, MTEM only

    Vec f_buf, g_buf, c_buf, z, r, z_try, r_try, fd, rhs, step_dir;
    Mat jac;
    double residual = 0.0;

    Impl(const SddeSystem& s, const SchemeConfig& cfg, double dt)
        : sys(s), scheme(cfg), delta(dt), jac(s.d, s.d) {
        if (!(delta > 0.0)) throw InputError("PathIntegrator: delta must be > 0");
        const int d = sys.d;
        f_buf.assign(d, 0.0);
        g_buf.assign(static_cast<std::size_t>(d) * sys.m, 0.0);
        c_buf.assign(d, 0.0);
        z.assign(d, 0.0);
        r.assign(d, 0.0);
        z_try.assign(d, 0.0);
        r_try.assign(d, 0.0);
        fd.assign(d, 0.0);
        rhs.assign(d, 0.0);
        step_dir.assign(d, 0.0);

        switch (scheme.kind) {
            case SchemeKind::EM:
                break;
            case SchemeKind::ThetaEM: {
                if (!(scheme.theta >= 0.0 && scheme.theta <= 1.0))
                    throw InputError("PathIntegrator: theta must lie in [0, 1]");
                if (scheme.theta > 0.0 && sys.lipschitz_model &&
                    sys.lipschitz_model->one_sided_L) {
                    const double lhs = *sys.lipschitz_model->one_sided_L * scheme.theta * delta;
                    if (lhs >= 1.0) {
                        std::ostringstream msg;
                        msg << "implicit step not well defined: L*theta*delta = " << lhs
                            << " must be < 1; refine the grid";
                        throw InputError(msg.str());
                    }
                }
                break;
            }
            case SchemeKind::MTEM: {
                if (!scheme.truncation)
                    throw ConfigError("PathIntegrator: MTEM requires a truncation config");
                trunc_h = scheme.truncation->h_of(delta);
                break;
            }
        }
    }

    void eval_coeffs(std::span<const double> x, std::span<const double> y) {
        if (scheme.kind == SchemeKind::MTEM) {
            truncate_apply(sys.drift, trunc_h, x, y, f_buf);
            truncate_apply(sys.diffusion, trunc_h, x, y, g_buf);
        } else {
            sys.drift(x, y, f_buf);
            sys.diffusion(x, y, g_buf);
        }
    }

    // out = X_k + cf * f(X_k, X_lag) + g(X_k, X_lag) * dW
    void explicit_update(std::span<const double> xk, double cf, std::span<const double> dw,
                         std::span<double> out) {
        const int d = sys.d, m = sys.m;
        for (int i = 0; i < d; ++i) {
            double acc = xk[i] + cf * f_buf[i];
            const double* grow = g_buf.data() + static_cast<std::size_t>(i) * m;
            for (int l = 0; l < m; ++l) acc += grow[l] * dw[l];
            out[i] = acc;
        }
    }

    // Residual of the implicit equation at z; y(z) is z itself when the next
    // step's lag is zero, otherwise the known delayed state.
    void eval_residual(std::span<const double> zv, std::span<const double> ylag, bool implicit_y,
                       std::span<double> out) {
        const int d = sys.d;
        std::span<const double> y = implicit_y ? zv : ylag;
        sys.drift(zv, y, f_buf);
        const double th = scheme.theta * delta;
        for (int i = 0; i < d; ++i) out[i] = zv[i] - c_buf[i] - th * f_buf[i];
    }

    // One damped Newton improvement of z; keeps the step only when the
    // residual decreases. Returns true if it moved.
    bool newton_improve(std::span<const double> ylag, bool implicit_y) {
        const int d = sys.d;
        for (int j = 0; j < d; ++j) {
            const double h = 1e-7 * (1.0 + std::fabs(z[j]));
            std::copy(z.begin(), z.end(), z_try.begin());
            z_try[j] += h;
            eval_residual(z_try, ylag, implicit_y, fd);
            for (int i = 0; i < d; ++i) jac(i, j) = (fd[i] - r[i]) / h;
        }
        for (int i = 0; i < d; ++i) rhs[i] = -r[i];
        if (!lu_solve(jac, rhs, step_dir)) return false;
        double alpha = 1.0;
        for (int half = 0; half < 7; ++half, alpha *= 0.5) {
            for (int i = 0; i < d; ++i) z_try[i] = z[i] + alpha * step_dir[i];
            eval_residual(z_try, ylag, implicit_y, r_try);
            const double res_try = norm2(r_try);
            if (res_try < residual * (1.0 - 1e-4 * alpha)) {
                std::swap(z, z_try);
                std::swap(r, r_try);
                residual = res_try;
                return true;
            }
        }
        return false;
    }

    StepResult solve_implicit(std::span<const double> ylag, bool implicit_y,
                              std::span<double> out) {
        const int d = sys.d;
        std::copy(c_buf.begin(), c_buf.end(), z.begin());
        eval_residual(z, ylag, implicit_y, r);
        residual = norm2(r);

        for (int it = 0; it < scheme.implicit_max_iter; ++it) {
            if (!std::isfinite(residual)) return StepResult::NonFinite;
            if (residual <= scheme.implicit_tol) {
                // Polish once: a converged iterate is usually one Newton step
                // away from the rounding floor, and the cheap extra step keeps
                // per-step errors from accumulating across a long path.
                newton_improve(ylag, implicit_y);
                std::copy(z.begin(), z.end(), out.begin());
                return StepResult::Ok;
            }

            if (!newton_improve(ylag, implicit_y)) {
                // Fixed-point iteration z <- c + theta*delta*f(z, y(z)); a
                // contraction whenever L*theta*delta < 1.
                std::span<const double> y = implicit_y ? std::span<const double>(z) : ylag;
                sys.drift(z, y, f_buf);
                const double th = scheme.theta * delta;
                for (int i = 0; i < d; ++i) z[i] = c_buf[i] + th * f_buf[i];
                eval_residual(z, ylag, implicit_y, r);
                residual = norm2(r);
            }
        }
        if (residual <= scheme.implicit_tol) {
            std::copy(z.begin(), z.end(), out.begin());
            return StepResult::Ok;
        }
        return std::isfinite(residual) ? StepResult::NoConvergence : StepResult::NonFinite;
    }

    StepResult advance(const PathState& state, std::span<const double> dw,
                       std::span<double> out) {
        const std::int64_t k = state.step_index();
        const auto xk = state.current();
        const auto ylag = state.state_at(k - lag_index(sys.delay, k, delta));

        const double theta = scheme.kind == SchemeKind::ThetaEM ? scheme.theta : 0.0;
        eval_coeffs(xk, ylag);
        explicit_update(xk, (1.0 - theta) * delta, dw, out);

        if (theta > 0.0) {
            std::copy(out.begin(), out.end(), c_buf.begin());
            const std::int64_t lag_next = lag_index(sys.delay, k + 1, delta);
            const bool implicit_y = lag_next == 0;
            std::span<const double> ylag_next =
                implicit_y ? std::span<const double>{} : state.state_at(k + 1 - lag_next);
            const StepResult res = solve_implicit(ylag_next, implicit_y, out);
            if (res != StepResult::Ok) return res;
        }
        return all_finite(out) ? StepResult::Ok : StepResult::NonFinite;
    }
};

PathIntegrator::PathIntegrator(const SddeSystem& sys, const SchemeConfig& scheme, double delta)
    : impl_(std::make_unique<Impl>(sys, scheme, delta)) {}
PathIntegrator::~PathIntegrator() = default;
PathIntegrator::PathIntegrator(PathIntegrator&&) noexcept = default;

StepResult PathIntegrator::advance(const PathState& state, std::span<const double> dw,
                                   std::span<double> out) {
    if (static_cast<int>(dw.size()) != impl_->sys.m)
        throw InputError("advance: noise increment length does not match noise dimension");
    if (static_cast<int>(out.size()) != impl_->sys.d)
        throw InputError("advance: output length does not match state dimension");
    return impl_->advance(state, dw, out);
}

double PathIntegrator::last_residual() const { return impl_->residual; }

// ---------------------------------------------------------------------------

namespace {

Vec run_single_step(const SddeSystem& sys, const SchemeConfig& scheme, const PathState& state,
                    double delta, std::span<const double> dw) {
    PathIntegrator integ(sys, scheme, delta);
    Vec out(sys.d);
    const StepResult res = integ.advance(state, dw, out);
    if (res == StepResult::NonFinite) {
        std::ostringstream msg;
        msg << "step " << state.step_index() << " produced a non-finite state";
        throw OverflowError(msg.str(), state.step_index());
    }
    if (res == StepResult::NoConvergence) {
        std::ostringstream msg;
        msg << "implicit solver stalled at step " << state.step_index() << " with residual "
            << integ.last_residual();
        throw ConvergenceError(msg.str(), integ.last_residual());
    }
    return out;
}

}  // namespace

Vec em_step(const SddeSystem& sys, const PathState& state, double delta,
            std::span<const double> dw) {
    return run_single_step(sys, SchemeConfig::em(), state, delta, dw);
}

Vec theta_step(const SddeSystem& sys, const PathState& state, double theta, double delta,
               std::span<const double> dw, double tol, int max_iter) {
    SchemeConfig cfg = SchemeConfig::theta_em(theta);
    cfg.implicit_tol = tol;
    cfg.implicit_max_iter = max_iter;
    return run_single_step(sys, cfg, state, delta, dw);
}

Vec mtem_step(const SddeSystem& sys, const PathState& state, const TruncationConfig& config,
              double delta, std::span<const double> dw) {
    return run_single_step(sys, SchemeConfig::mtem(config), state, delta, dw);
}

PathRun integrate_path_into(const SddeSystem& sys, const SchemeConfig& scheme,
                            const GridSpec& grid, const InitialSegment& xi,
                            const NoiseSource& noise, Trajectory& out, double max_norm) {
    out.reset(sys.d, grid);
    PathState state(sys.d, grid.m_bar);
    for (std::int64_t k = -grid.m_bar; k <= 0; ++k) {
        auto dst = out.state_mut(k);
        xi.evaluate(static_cast<double>(k) * grid.delta, dst);
        if (!all_finite(dst)) {
            std::ostringstream msg;
            msg << "initial segment evaluated to a non-finite value at s = "
                << static_cast<double>(k) * grid.delta;
            throw EvaluationError(msg.str());
        }
        state.set_history_entry(k, dst);
    }

    PathIntegrator integ(sys, scheme, grid.delta);
    Vec dw(sys.m);
    PathRun run;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        noise.fill(k, dw);
        auto next = out.state_mut(k + 1);
        const StepResult res = integ.advance(state, dw, next);
        if (res != StepResult::Ok || norm2(next) > max_norm) {
            run.result = res == StepResult::Ok ? StepResult::NonFinite : res;
            run.failed_step = k;
            run.residual = integ.last_residual();
            return run;
        }
        state.push(next);
    }
    return run;
}

Trajectory integrate_path(const SddeSystem& sys, const SchemeConfig& scheme, const GridSpec& grid,
                          const InitialSegment& xi, const NoiseSource& noise) {
    Trajectory traj;
    const PathRun run = integrate_path_into(sys, scheme, grid, xi, noise, traj);
    if (run.result == StepResult::NonFinite) {
        std::ostringstream msg;
        msg << "step " << run.failed_step << " produced a non-finite state";
        throw OverflowError(msg.str(), run.failed_step);
    }
    if (run.result == StepResult::NoConvergence) {
        std::ostringstream msg;
        msg << "implicit solver stalled at step " << run.failed_step << " with residual "
            << run.residual;
        throw ConvergenceError(msg.str(), run.residual);
    }
    return traj;
}

}  // namespace stabilab
