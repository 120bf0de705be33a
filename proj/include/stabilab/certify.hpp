#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "stabilab/model.hpp"

namespace stabilab {

/// A mean-square stability certificate: a strictly positive weight vector p
/// with sum_j (a_ij + b_ij) p_j < 0 for every row i, plus the decay rate beta
/// once computed against a concrete maximum delay.
struct Certificate {
    Vec p;
    double beta = 0.0;
    Vec margins;  // sum_j (a_ij + b_ij) p_j per row
};

struct Infeasible {
    double spectral_abscissa = 0.0;
};

using CertificateOutcome = std::variant<Certificate, Infeasible>;

inline bool is_feasible(const CertificateOutcome& o) {
    return std::holds_alternative<Certificate>(o);
}

struct KhasminskiiDiagnostic {
    bool feasible = false;
    Vec col_sums_a;  // S_a(j) = sum_i a_ij
    Vec col_sums_b;  // S_b(j) = sum_i b_ij
};

struct BoundViolation {
    std::int64_t sample_index = 0;
    Vec x;
    Vec y;
    int row = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct DiagnosticsReport {
    KhasminskiiDiagnostic khasminskii;
    double growth_K = 1.0;
    std::vector<BoundViolation> violations;
    std::int64_t n_samples = 0;
    double radius = 0.0;
};

struct MarginReport {
    Vec margins;
    bool feasible = false;
};

struct ThetaConditionReport {
    Vec margins;  // eps * a_ii p_i + sum_{j != i} a_ij p_j + sum_j b_ij p_j
    bool feasible = false;
    double epsilon_bound = 0.0;  // min_i |a_ii| / (d * max_i |a_ii|)
};

/// Samples (x, y) uniformly in the ball of the given radius and checks the
/// componentwise bound row by row. Returns every violation, in sample order.
DiagnosticsReport check_componentwise_bound(const SddeSystem& sys, const CoeffBounds& bounds,
                                            std::int64_t n_samples, double radius,
                                            std::uint64_t seed, int threads = 0);

/// Column-sum test for whether the aggregated Khasminskii form could hold:
/// possible only if max_j S_a(j) < 0 and min_j(-S_a(j)) > max_j S_b(j).
KhasminskiiDiagnostic khasminskii_diagnostic(const CoeffBounds& bounds);

/// K = max_j { sum_i |a_ij|, sum_i b_ij } or 1, whichever is larger.
double growth_constant(const CoeffBounds& bounds);

/// Spectral abscissa of a Metzler matrix: closed form for d <= 2, shifted
/// power iteration for larger d.
double spectral_abscissa(const Mat& metzler);

/// Constructs p = (-M)^{-1} 1 for M = A + B when M is Hurwitz; then M p = -1
/// exactly and every margin equals -1.
CertificateOutcome find_certificate(const CoeffBounds& bounds);

MarginReport verify_certificate(const CoeffBounds& bounds, const Vec& p);

/// Largest beta >= 0 with max_i [sum_j a_ij p_j + e^{beta tau} sum_j b_ij p_j
/// + beta p_i] <= 0, located by bisection to 1e-10 absolute.
double decay_rate(const CoeffBounds& bounds, const Vec& p, double tau_max);

/// The epsilon-weakened row condition used by the implicit theta scheme for
/// theta in (1/2, 1].
ThetaConditionReport check_theta_condition(const CoeffBounds& bounds, const Vec& p,
                                           double epsilon);

/// Certificate search for the epsilon-condition: scales the diagonal of A by
/// epsilon and runs the Metzler construction on the modified matrix.
CertificateOutcome find_theta_certificate(const CoeffBounds& bounds, double epsilon);

}  // namespace stabilab
