#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stabilab/schemes.hpp"

namespace stabilab {

/// Brownian increments as a pure function of (seed, path_id, step, component):
/// Gaussian(0, delta) per component, reproducible under any call order or
/// thread assignment. The stream never depends on the scheme, so scheme
/// comparisons share their noise by construction.
class NoiseStream final : public NoiseSource {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t path_id, int m, double delta);

    void fill(std::int64_t step, std::span<double> out) const override;
    Vec increments(std::int64_t step) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t path_id() const { return path_id_; }
    int noise_dim() const { return m_; }
    double delta() const { return delta_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t path_id_ = 0;
    int m_ = 0;
    double delta_ = 0.0;
    double sqrt_delta_ = 0.0;
};

Vec brownian_increments(const NoiseStream& stream, std::int64_t step);

/// Ensemble second-moment estimates on the full grid k = -m_bar .. n_steps.
struct MomentSeries {
    Vec times;                              // t_k = k * delta
    std::vector<Vec> component_moments;     // [i][row]: estimate of E|X_k^i|^2
    Vec weighted;                           // V_k = sum_i component_moments[i][k] / p_i
    Vec weighted_se;                        // standard error of the per-path weighted sum
    std::vector<std::int64_t> n_alive;      // paths finite through step k
    std::int64_t n_paths = 0;
    std::int64_t n_diverged = 0;
    std::int64_t m_bar = 0;
    double delta = 0.0;

    int dim() const { return static_cast<int>(component_moments.size()); }
    std::int64_t rows() const { return static_cast<std::int64_t>(times.size()); }
};

/// OpenMP ensemble estimator. Paths are processed in fixed-size blocks and
/// reduced in block order, so the output is bitwise identical for any worker
/// count (threads = 0 picks the OpenMP default).
MomentSeries ensemble_moments(const SddeSystem& sys, const SchemeConfig& scheme,
                              const GridSpec& grid, const InitialSegment& xi,
                              std::int64_t n_paths, std::uint64_t seed,
                              const std::optional<Vec>& p = std::nullopt, int threads = 0);

/// Serial reference implementation with the identical reduction order; kept
/// for testing the parallel kernel against.
MomentSeries ensemble_moments_serial(const SddeSystem& sys, const SchemeConfig& scheme,
                                     const GridSpec& grid, const InitialSegment& xi,
                                     std::int64_t n_paths, std::uint64_t seed,
                                     const std::optional<Vec>& p = std::nullopt);

struct DecayFit {
    double lambda = 0.0;      // slope of ln(V) against t, per unit time
    double stderror = 0.0;    // standard error of the slope
    std::int64_t n_points = 0;
    double window_start = 0.0;
};

/// Least-squares slope of ln(V_k) over the trailing window_fraction of the
/// simulated horizon [0, T]; rows with V_k <= 1e-300 are skipped.
DecayFit fit_decay_rate(const MomentSeries& series, double window_fraction);

/// Terminal pathwise exponents log|X_N^i| / (N * delta); exactly-zero
/// components map to -infinity.
Vec as_exponent(const Trajectory& traj, const GridSpec& grid);

}  // namespace stabilab
