#pragma once

#include <cstdint>
#include <vector>

#include "stabilab/model.hpp"

namespace stabilab {

/// Truncation radius h(Delta) = h0 * Delta^(-gamma) on (0, delta_star].
/// For a Polynomial(c, q) Lipschitz model the exponent must satisfy
/// gamma < 1/(2q), which makes L_{h(Delta)}^2 * Delta -> 0 as Delta -> 0.
struct TruncationConfig {
    double h0 = 1.0;
    double gamma = 0.25;
    double delta_star = 1.0;

    double h_of(double delta) const;

    /// Validates the (h0, gamma, delta_star) triple against a Lipschitz model.
    static TruncationConfig checked(double h0, double gamma, double delta_star,
                                    const std::optional<LipschitzModel>& model);
    /// Default admissible configuration for a model: gamma = 1/(4q) for
    /// polynomial models, 1/4 otherwise.
    static TruncationConfig for_model(const std::optional<LipschitzModel>& model,
                                      double h0 = 1.0, double delta_star = 1.0);
};

double h_of_delta(const TruncationConfig& config, double delta);

/// Radial truncation of a coefficient map: inside the ball |x| v |y| <= h the
/// map is untouched; outside, arguments are pulled back onto the sphere of
/// radius h and the output is scaled back up by (|x| v |y|) / h.
/// Works for the drift (out length d) and the diffusion (out length d*m) alike.
void truncate_apply(const std::function<void(std::span<const double>, std::span<const double>,
                                             std::span<double>)>& coeff,
                    double h, std::span<const double> x, std::span<const double> y,
                    std::span<double> out);

struct LemmaViolation {
    std::int64_t sample_index = 0;
    int which = 0;  // 1 = componentwise bound of the truncated pair, 2 = linear growth
    int row = 0;    // row index for lemma 1, unused for lemma 2
    double lhs = 0.0;
    double rhs = 0.0;
};

struct TruncationCheckReport {
    std::vector<LemmaViolation> violations;
    std::int64_t n_samples = 0;
    std::int64_t n_outside = 0;  // samples with |x| v |y| > h
    double h = 0.0;
    double lipschitz_at_h = 0.0;
};

/// Sampling check of the two truncation properties: the truncated pair still
/// satisfies the componentwise bound with the same matrices, and it grows at
/// most linearly with constant L_{h(Delta)}. At least a quarter of the samples
/// land outside the truncation ball by construction.
TruncationCheckReport check_truncation_lemmas(const SddeSystem& sys, const CoeffBounds& bounds,
                                              const TruncationConfig& config, double delta,
                                              std::int64_t n_samples, std::uint64_t seed,
                                              int threads = 0);

}  // namespace stabilab
