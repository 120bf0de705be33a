#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "stabilab/linalg.hpp"

namespace stabilab {

/// Time-dependent delay tau(t) with 0 < tau(t) <= tau_max. All types in this
/// header are immutable after construction and safe to share across workers;
/// the callables they hold must tolerate concurrent invocation.
struct DelayFunction {
    std::function<double(double)> evaluate;
    double tau_max = 0.0;

    static DelayFunction constant(double tau) {
        return {[tau](double) { return tau; }, tau};
    }
};

/// How the local Lipschitz constant of (f, g) grows with the ball radius R:
/// a fixed global constant, or c * (1 + R^q) for polynomial coefficients.
struct LipschitzModel {
    enum class Kind { Global, Polynomial };

    Kind kind = Kind::Global;
    double L = 0.0;   // Global
    double c = 0.0;   // Polynomial
    double q = 0.0;   // Polynomial exponent

    /// One-sided Lipschitz constant of the drift in its first argument;
    /// required for the implicit theta step to be well defined.
    std::optional<double> one_sided_L;
    /// Linear-growth constant of the drift, |f(x,y)| <= K(|x|+|y|), when the
    /// drift is (at most) linear.
    std::optional<double> drift_linear_K;

    double lipschitz_at(double radius) const {
        return kind == Kind::Global ? L : c * (1.0 + std::pow(radius, q));
    }

    static LipschitzModel global(double L);
    static LipschitzModel polynomial(double c, double q);
};

/// Matrices A = (a_ij), B = (b_ij) of the componentwise dissipativity bound
///   2 x_i f_i(x,y) + sum_l g_il(x,y)^2 <= sum_j a_ij x_j^2 + sum_j b_ij y_j^2.
/// A must be Metzler (off-diagonal entries nonnegative) and B nonnegative.
struct CoeffBounds {
    Mat A;
    Mat B;

    CoeffBounds() = default;
    CoeffBounds(Mat a, Mat b);
    int dim() const { return A.rows(); }
};

/// Drift callable: f(x, y) written into `out` (length d).
using DriftFn = std::function<void(std::span<const double> x, std::span<const double> y,
                                   std::span<double> out)>;
/// Diffusion callable: g(x, y) written into `out` row-major (d rows, m cols).
using DiffusionFn = std::function<void(std::span<const double> x, std::span<const double> y,
                                       std::span<double> out)>;

/// A stochastic differential delay equation
///   dx(t) = f(x(t), x(t - tau(t))) dt + g(x(t), x(t - tau(t))) dB(t)
/// with d-dimensional state and m-dimensional driving noise. The trivial
/// solution requires f(0,0) = 0 and g(0,0) = 0.
struct SddeSystem {
    int d = 0;
    int m = 0;
    DriftFn drift;
    DiffusionFn diffusion;
    DelayFunction delay;
    std::optional<LipschitzModel> lipschitz_model;
    std::optional<CoeffBounds> claimed_bounds;
};

Vec eval_drift(const SddeSystem& sys, std::span<const double> x, std::span<const double> y);
Mat eval_diffusion(const SddeSystem& sys, std::span<const double> x, std::span<const double> y);

/// Initial data xi on [-tau_max, 0]; evaluated pointwise on the grid, no
/// interpolation.
struct InitialSegment {
    std::function<void(double s, std::span<double> out)> evaluate;
    std::optional<double> norm_bound;

    static InitialSegment constant(Vec value);
    static InitialSegment zero(int d);
};

/// Uniform grid with stepsize Delta = tau_max / m_bar, so that the maximum
/// delay is an exact multiple of the stepsize.
struct GridSpec {
    std::int64_t m_bar = 1;
    double delta = 0.0;
    std::int64_t n_steps = 0;
    double horizon = 0.0;

    static GridSpec from_delay_steps(double tau_max, std::int64_t m_bar, std::int64_t n_steps);
};

}  // namespace stabilab
