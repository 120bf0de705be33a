#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "stabilab/model.hpp"
#include "stabilab/truncation.hpp"

namespace stabilab {

enum class SchemeKind { EM, ThetaEM, MTEM };

struct SchemeConfig {
    SchemeKind kind = SchemeKind::EM;
    double theta = 0.0;  // ThetaEM only; must lie in [0, 1]
    std::optional<TruncationConfig> truncation;
    double implicit_tol = 1e-12;
    int implicit_max_iter = 100;

    static SchemeConfig em() { return {}; }
    static SchemeConfig theta_em(double theta);
    static SchemeConfig mtem(TruncationConfig config);
};

/// Rolling window of the last m_bar + 1 states X_{k - m_bar} .. X_k.
/// Indexing is by the scheme's own step index k, which starts at 0 on the
/// discretized initial segment and may only move forward.
class PathState {
public:
    PathState(int d, std::int64_t m_bar);

    /// History for k = -m_bar .. 0; entry i corresponds to k = i - m_bar.
    static PathState with_history(int d, std::int64_t m_bar, const std::vector<Vec>& states);

    int dimension() const { return d_; }
    std::int64_t m_bar() const { return m_bar_; }
    std::int64_t step_index() const { return k_; }

    /// State X_idx for idx in [k - m_bar, k]; anything newer than the current
    /// step is unreadable by construction.
    std::span<const double> state_at(std::int64_t idx) const;
    std::span<const double> current() const { return state_at(k_); }

    void set_history_entry(std::int64_t k, std::span<const double> value);
    void push(std::span<const double> next);

private:
    std::span<double> slot(std::int64_t idx);
    int d_ = 0;
    std::int64_t m_bar_ = 0;
    std::int64_t k_ = 0;
    std::vector<double> ring_;  // (m_bar + 1) rows of length d
};

/// floor(tau(k * delta) / delta); the ratio is snapped to the nearest integer
/// when within 1e-9 so an exactly-constant delay always yields m_bar.
std::int64_t lag_index(const DelayFunction& delay, std::int64_t k, double delta);

Vec em_step(const SddeSystem& sys, const PathState& state, double delta,
            std::span<const double> dw);
Vec theta_step(const SddeSystem& sys, const PathState& state, double theta, double delta,
               std::span<const double> dw, double tol = 1e-12, int max_iter = 100);
Vec mtem_step(const SddeSystem& sys, const PathState& state, const TruncationConfig& config,
              double delta, std::span<const double> dw);

/// Full discrete path, indices k = -m_bar .. n_steps.
struct Trajectory {
    int d = 0;
    std::int64_t m_bar = 0;
    std::int64_t n_steps = 0;
    double delta = 0.0;
    std::vector<double> data;

    void reset(int dim, const GridSpec& grid);
    std::span<const double> state(std::int64_t k) const;
    std::span<double> state_mut(std::int64_t k);
};

/// Source of Brownian increments; fill() must be a pure function of the step
/// index so concurrent paths can share nothing.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    virtual void fill(std::int64_t step, std::span<double> out) const = 0;
};

enum class StepResult { Ok, NonFinite, NoConvergence };

struct PathRun {
    StepResult result = StepResult::Ok;
    std::int64_t failed_step = -1;
    double residual = 0.0;
};

/// Reusable single-path stepping engine; owns all scratch buffers so the hot
/// loop is allocation-free.
class PathIntegrator {
public:
    PathIntegrator(const SddeSystem& sys, const SchemeConfig& scheme, double delta);
    ~PathIntegrator();
    PathIntegrator(PathIntegrator&&) noexcept;

    /// Computes X_{k+1} from the window at step k. Never throws on numerical
    /// failure; the caller decides whether that is fatal.
    StepResult advance(const PathState& state, std::span<const double> dw,
                       std::span<double> out);
    double last_residual() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Integrates one path and throws on any step failure.
Trajectory integrate_path(const SddeSystem& sys, const SchemeConfig& scheme, const GridSpec& grid,
                          const InitialSegment& xi, const NoiseSource& noise);

/// Non-throwing variant for ensemble use: on failure the trajectory is valid
/// up to (and excluding) state failed_step + 1. States whose norm exceeds
/// max_norm are treated as divergence so squared moments cannot overflow.
PathRun integrate_path_into(const SddeSystem& sys, const SchemeConfig& scheme,
                            const GridSpec& grid, const InitialSegment& xi,
                            const NoiseSource& noise, Trajectory& out,
                            double max_norm = std::numeric_limits<double>::infinity());

}  // namespace stabilab
