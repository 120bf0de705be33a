#include "stabilab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stabilab/rng.hpp"

namespace stabilab {

namespace {

constexpr double kDegenerateTol = 1e-12;

void require_positive(const Vec& p) {
    for (double v : p)
        if (!(v > 0.0)) throw InputError("certificate weights p must be strictly positive");
}

double abscissa_2x2(const Mat& m) {
    // Metzler => real eigenvalues; the larger one is (tr + sqrt(disc)) / 2.
    const double tr = m(0, 0) + m(1, 1);
    const double disc = (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + 4.0 * m(0, 1) * m(1, 0);
    return 0.5 * (tr + std::sqrt(std::max(disc, 0.0)));
}

double abscissa_power_iteration(const Mat& m) {
    const int d = m.rows();
    double max_abs_diag = 0.0;
    double max_row_sum = 0.0;
    for (int i = 0; i < d; ++i) {
        max_abs_diag = std::max(max_abs_diag, std::fabs(m(i, i)));
        double rs = 0.0;
        for (int j = 0; j < d; ++j) rs += std::fabs(m(i, j));
        max_row_sum = std::max(max_row_sum, rs);
    }
    const double shift = max_abs_diag + max_row_sum;
    if (shift == 0.0) return 0.0;  // zero matrix

    // P = M + shift*I is nonnegative with positive diagonal, so the dominant
    // eigenvalue is the Perron root and plain power iteration converges.
    Vec v(d, 1.0 / d), w(d);
    double lambda = 0.0;
    const int max_iter = 100000;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < d; ++i) {
            double s = shift * v[i];
            for (int j = 0; j < d; ++j) s += m(i, j) * v[j];
            w[i] = s;
        }
        double nrm = 0.0;
        for (int i = 0; i < d; ++i) nrm = std::max(nrm, std::fabs(w[i]));
        if (nrm == 0.0) return -shift;
        const double prev = lambda;
        lambda = nrm;
        for (int i = 0; i < d; ++i) v[i] = w[i] / nrm;
        if (it > 0 && std::fabs(lambda - prev) <= 1e-12 * std::max(1.0, lambda))
            return lambda - shift;
    }
    throw ConvergenceError("spectral_abscissa: power iteration did not settle", lambda);
}

}  // namespace

double spectral_abscissa(const Mat& m) {
    if (m.rows() != m.cols()) throw InputError("spectral_abscissa: matrix must be square");
    switch (m.rows()) {
        case 0:
            throw InputError("spectral_abscissa: empty matrix");
        case 1:
            return m(0, 0);
        case 2:
            return abscissa_2x2(m);
        default:
            return abscissa_power_iteration(m);
    }
}

DiagnosticsReport check_componentwise_bound(const SddeSystem& sys, const CoeffBounds& bounds,
                                            std::int64_t n_samples, double radius,
                                            std::uint64_t seed, int threads) {
    if (n_samples < 1) throw InputError("check_componentwise_bound: n_samples must be >= 1");
    if (!(radius > 0.0)) throw InputError("check_componentwise_bound: radius must be > 0");
    const int d = sys.d;
    if (bounds.dim() != d)
        throw InputError("check_componentwise_bound: bounds dimension does not match system");

    DiagnosticsReport rep;
    rep.khasminskii = khasminskii_diagnostic(bounds);
    rep.growth_K = growth_constant(bounds);
    rep.n_samples = n_samples;
    rep.radius = radius;

    std::vector<std::vector<BoundViolation>> found(static_cast<std::size_t>(n_samples));
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
            Vec x(d), y(d), f(d);
            Mat g(d, sys.m);
            rng::uniform_in_ball(seed, static_cast<std::uint64_t>(s), 0, radius, x);
            rng::uniform_in_ball(seed, static_cast<std::uint64_t>(s), 1, radius, y);
            sys.drift(x, y, f);
            sys.diffusion(x, y, g.data());
            if (!all_finite(f) || !all_finite(g.data())) {
                std::ostringstream msg;
                msg << "non-finite coefficient value at sample " << s;
                throw EvaluationError(msg.str());
            }
            for (int i = 0; i < d; ++i) {
                double lhs = 2.0 * x[i] * f[i];
                for (int l = 0; l < sys.m; ++l) lhs += g(i, l) * g(i, l);
                double rhs = 0.0;
                for (int j = 0; j < d; ++j)
                    rhs += bounds.A(i, j) * x[j] * x[j] + bounds.B(i, j) * y[j] * y[j];
                const double slack = 1e-9 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
                if (lhs > rhs + slack)
                    found[static_cast<std::size_t>(s)].push_back({s, x, y, i, lhs, rhs});
            }
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    for (auto& per_sample : found)
        for (auto& v : per_sample) rep.violations.push_back(std::move(v));
    return rep;
}

KhasminskiiDiagnostic khasminskii_diagnostic(const CoeffBounds& bounds) {
    const int d = bounds.dim();
    KhasminskiiDiagnostic diag;
    diag.col_sums_a.assign(d, 0.0);
    diag.col_sums_b.assign(d, 0.0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            diag.col_sums_a[j] += bounds.A(i, j);
            diag.col_sums_b[j] += bounds.B(i, j);
        }
    const double max_sa = *std::max_element(diag.col_sums_a.begin(), diag.col_sums_a.end());
    const double max_sb = *std::max_element(diag.col_sums_b.begin(), diag.col_sums_b.end());
    double min_neg_sa = std::numeric_limits<double>::infinity();
    for (double s : diag.col_sums_a) min_neg_sa = std::min(min_neg_sa, -s);
    diag.feasible = max_sa < 0.0 && min_neg_sa > max_sb;
    return diag;
}

double growth_constant(const CoeffBounds& bounds) {
    const int d = bounds.dim();
    double k = 1.0;
    for (int j = 0; j < d; ++j) {
        double abs_a = 0.0, sum_b = 0.0;
        for (int i = 0; i < d; ++i) {
            abs_a += std::fabs(bounds.A(i, j));
            sum_b += bounds.B(i, j);
        }
        k = std::max({k, abs_a, sum_b});
    }
    return k;
}

CertificateOutcome find_certificate(const CoeffBounds& bounds) {
    const int d = bounds.dim();
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = bounds.A(i, j) + bounds.B(i, j);

    const double abscissa = spectral_abscissa(m);
    if (abscissa >= 0.0) return Infeasible{abscissa};
    if (abscissa > -kDegenerateTol) {
        std::ostringstream msg;
        msg << "find_certificate: spectral abscissa " << abscissa
            << " is within " << kDegenerateTol << " of 0; -(A+B) is numerically singular";
        throw ConvergenceError(msg.str(), abscissa);
    }

    Mat neg(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) neg(i, j) = -m(i, j);
    Vec p;
    if (!lu_solve(neg, Vec(d, 1.0), p))
        throw ConvergenceError("find_certificate: linear solve failed", abscissa);

    Certificate cert;
    cert.p = p;
    cert.margins.assign(d, 0.0);
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += m(i, j) * p[j];
        cert.margins[i] = s;
        // A Hurwitz Metzler matrix guarantees p > 0 and Mp = -1; anything else
        // means the solve degenerated numerically.
        if (!(p[i] > 0.0) || !(s < 0.0))
            throw ConvergenceError("find_certificate: solve produced an invalid certificate",
                                   abscissa);
    }
    return cert;
}

MarginReport verify_certificate(const CoeffBounds& bounds, const Vec& p) {
    const int d = bounds.dim();
    if (static_cast<int>(p.size()) != d)
        throw InputError("verify_certificate: p length does not match dimension");
    require_positive(p);
    MarginReport rep;
    rep.margins.assign(d, 0.0);
    rep.feasible = true;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += (bounds.A(i, j) + bounds.B(i, j)) * p[j];
        rep.margins[i] = s;
        if (!(s < 0.0)) rep.feasible = false;
    }
    return rep;
}

double decay_rate(const CoeffBounds& bounds, const Vec& p, double tau_max) {
    if (!(tau_max > 0.0)) throw InputError("decay_rate: tau_max must be > 0");
    const auto base = verify_certificate(bounds, p);
    if (!base.feasible)
        throw InputError("decay_rate: p is not a feasible certificate for these bounds");

    const int d = bounds.dim();
    Vec row_a(d, 0.0), row_b(d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            row_a[i] += bounds.A(i, j) * p[j];
            row_b[i] += bounds.B(i, j) * p[j];
        }

    const auto objective = [&](double beta) {
        const double growth = std::exp(beta * tau_max);
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i)
            worst = std::max(worst, row_a[i] + growth * row_b[i] + beta * p[i]);
        return worst;
    };

    double hi = 0.0;
    for (int i = 0; i < d; ++i) hi = std::max(hi, std::fabs(base.margins[i]) / p[i]);
    if (objective(hi) <= 0.0) return hi;

    double lo = 0.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (objective(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

ThetaConditionReport check_theta_condition(const CoeffBounds& bounds, const Vec& p,
                                           double epsilon) {
    const int d = bounds.dim();
    if (static_cast<int>(p.size()) != d)
        throw InputError("check_theta_condition: p length does not match dimension");
    require_positive(p);

    double min_abs = std::numeric_limits<double>::infinity(), max_abs = 0.0;
    for (int i = 0; i < d; ++i) {
        if (!(bounds.A(i, i) < 0.0))
            throw InputError("check_theta_condition: all diagonal a_ii must be < 0");
        min_abs = std::min(min_abs, std::fabs(bounds.A(i, i)));
        max_abs = std::max(max_abs, std::fabs(bounds.A(i, i)));
    }
    const double bound = min_abs / (d * max_abs);
    if (!(epsilon > 0.0) || !(epsilon < bound)) {
        std::ostringstream msg;
        msg << "check_theta_condition: epsilon must lie in (0, " << bound << ")";
        throw InputError(msg.str());
    }

    ThetaConditionReport rep;
    rep.epsilon_bound = bound;
    rep.margins.assign(d, 0.0);
    rep.feasible = true;
    for (int i = 0; i < d; ++i) {
        double s = epsilon * bounds.A(i, i) * p[i];
        for (int j = 0; j < d; ++j) {
            if (j != i) s += bounds.A(i, j) * p[j];
            s += bounds.B(i, j) * p[j];
        }
        rep.margins[i] = s;
        if (!(s < 0.0)) rep.feasible = false;
    }
    return rep;
}

CertificateOutcome find_theta_certificate(const CoeffBounds& bounds, double epsilon) {
    const int d = bounds.dim();
    Mat a = bounds.A;
    for (int i = 0; i < d; ++i) a(i, i) *= epsilon;
    return find_certificate(CoeffBounds(std::move(a), bounds.B));
}

}  // namespace stabilab
