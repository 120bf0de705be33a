#include "stabilab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stabilab/rng.hpp"

namespace stabilab {

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t path_id, int m, double delta)
    : seed_(seed), path_id_(path_id), m_(m), delta_(delta) {
    if (m < 1) throw InputError("NoiseStream: noise dimension must be >= 1");
    if (!(delta > 0.0)) throw InputError("NoiseStream: delta must be > 0");
    sqrt_delta_ = std::sqrt(delta);
}

void NoiseStream::fill(std::int64_t step, std::span<double> out) const {
    if (step < 0) throw InputError("NoiseStream: step must be >= 0");
    if (static_cast<int>(out.size()) != m_) throw InputError("NoiseStream: output length mismatch");
    const rng::Key key{seed_, path_id_};
    for (int i = 0; i < m_; i += 4) {
        const auto z = rng::gaussian_block(
            {static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(i / 4), 0, 0}, key);
        for (int j = 0; j < 4 && i + j < m_; ++j) out[i + j] = sqrt_delta_ * z[j];
    }
}

Vec NoiseStream::increments(std::int64_t step) const {
    Vec out(m_);
    fill(step, out);
    return out;
}

Vec brownian_increments(const NoiseStream& stream, std::int64_t step) {
    return stream.increments(step);
}

namespace {

// Fixed path-block size: the reduction order is "paths in order inside a
// block, blocks in order", which makes the sums independent of how blocks are
// assigned to threads.
constexpr std::int64_t kPathBlock = 32;

struct BlockAccum {
    std::vector<double> sum_sq;  // d * rows, component-major
    std::vector<double> sum_v;   // rows (weighted per-path sums), only when p given
    std::vector<double> sum_v2;  // rows
    std::vector<std::int64_t> alive;
    std::int64_t diverged = 0;
};

struct EnsembleSpec {
    const SddeSystem& sys;
    const SchemeConfig& scheme;
    const GridSpec& grid;
    const InitialSegment& xi;
    std::int64_t n_paths;
    std::uint64_t seed;
    const std::optional<Vec>& p;
};

// A state is counted as diverged once its squared norm could no longer be
// accumulated in double precision.
constexpr double kDivergenceNorm = 1e100;

void accumulate_block(const EnsembleSpec& es, std::int64_t block, BlockAccum& acc) {
    const int d = es.sys.d;
    const std::int64_t rows = es.grid.n_steps + es.grid.m_bar + 1;
    acc.sum_sq.assign(static_cast<std::size_t>(d) * rows, 0.0);
    if (es.p) {
        acc.sum_v.assign(rows, 0.0);
        acc.sum_v2.assign(rows, 0.0);
    }
    acc.alive.assign(rows, 0);

    const std::int64_t first = block * kPathBlock;
    const std::int64_t last = std::min(first + kPathBlock, es.n_paths);
    Trajectory traj;
    for (std::int64_t path = first; path < last; ++path) {
        NoiseStream noise(es.seed, static_cast<std::uint64_t>(path), es.sys.m, es.grid.delta);
        const PathRun run =
            integrate_path_into(es.sys, es.scheme, es.grid, es.xi, noise, traj, kDivergenceNorm);
        // Rows up to (excluding) the failed state are valid.
        std::int64_t good_rows = rows;
        if (run.result != StepResult::Ok) {
            good_rows = run.failed_step + es.grid.m_bar + 1;
            ++acc.diverged;
        }
        for (std::int64_t row = 0; row < good_rows; ++row) {
            const double* x = traj.data.data() + row * d;
            double v = 0.0;
            for (int i = 0; i < d; ++i) {
                const double sq = x[i] * x[i];
                acc.sum_sq[static_cast<std::size_t>(i) * rows + row] += sq;
                if (es.p) v += sq / (*es.p)[i];
            }
            if (es.p) {
                acc.sum_v[row] += v;
                acc.sum_v2[row] += v * v;
            }
            ++acc.alive[row];
        }
    }
}

MomentSeries reduce_blocks(const EnsembleSpec& es, std::vector<BlockAccum>& blocks) {
    const int d = es.sys.d;
    const std::int64_t rows = es.grid.n_steps + es.grid.m_bar + 1;

    std::vector<double> sum_sq(static_cast<std::size_t>(d) * rows, 0.0);
    std::vector<double> sum_v(rows, 0.0), sum_v2(rows, 0.0);
    std::vector<std::int64_t> alive(rows, 0);
    std::int64_t diverged = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < sum_sq.size(); ++i) sum_sq[i] += b.sum_sq[i];
        if (es.p)
            for (std::int64_t r = 0; r < rows; ++r) {
                sum_v[r] += b.sum_v[r];
                sum_v2[r] += b.sum_v2[r];
            }
        for (std::int64_t r = 0; r < rows; ++r) alive[r] += b.alive[r];
        diverged += b.diverged;
    }

    for (std::int64_t r = 0; r < rows; ++r)
        if (alive[r] == 0) {
            std::ostringstream msg;
            msg << "every path diverged by step k = " << (r - es.grid.m_bar);
            throw EstimationError(msg.str());
        }

    MomentSeries out;
    out.n_paths = es.n_paths;
    out.n_diverged = diverged;
    out.m_bar = es.grid.m_bar;
    out.delta = es.grid.delta;
    out.times.resize(rows);
    out.n_alive = std::move(alive);
    for (std::int64_t r = 0; r < rows; ++r)
        out.times[r] = static_cast<double>(r - es.grid.m_bar) * es.grid.delta;

    out.component_moments.assign(d, Vec(rows, 0.0));
    for (int i = 0; i < d; ++i)
        for (std::int64_t r = 0; r < rows; ++r)
            out.component_moments[i][r] =
                sum_sq[static_cast<std::size_t>(i) * rows + r] / out.n_alive[r];

    if (es.p) {
        out.weighted.assign(rows, 0.0);
        out.weighted_se.assign(rows, 0.0);
        for (std::int64_t r = 0; r < rows; ++r) {
            double v = 0.0;
            for (int i = 0; i < d; ++i) v += out.component_moments[i][r] / (*es.p)[i];
            out.weighted[r] = v;
            const auto n = static_cast<double>(out.n_alive[r]);
            if (out.n_alive[r] >= 2) {
                const double var =
                    std::max(0.0, (sum_v2[r] - sum_v[r] * sum_v[r] / n) / (n - 1.0));
                out.weighted_se[r] = std::sqrt(var / n);
            }
        }
    }
    return out;
}

void validate_ensemble_args(const EnsembleSpec& es) {
    if (es.n_paths < 1) throw InputError("ensemble_moments: n_paths must be >= 1");
    if (es.p) {
        if (static_cast<int>(es.p->size()) != es.sys.d)
            throw InputError("ensemble_moments: weight vector length does not match dimension");
        for (double v : *es.p)
            if (!(v > 0.0)) throw InputError("ensemble_moments: weights must be > 0");
    }
}

}  // namespace

MomentSeries ensemble_moments(const SddeSystem& sys, const SchemeConfig& scheme,
                              const GridSpec& grid, const InitialSegment& xi,
                              std::int64_t n_paths, std::uint64_t seed,
                              const std::optional<Vec>& p, int threads) {
    const EnsembleSpec es{sys, scheme, grid, xi, n_paths, seed, p};
    validate_ensemble_args(es);
    const std::int64_t n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;
    std::vector<BlockAccum> blocks(static_cast<std::size_t>(n_blocks));
    std::exception_ptr err;

#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
    const int nthreads = 1;
    (void)threads;
#endif

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        try {
            accumulate_block(es, b, blocks[static_cast<std::size_t>(b)]);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return reduce_blocks(es, blocks);
}

MomentSeries ensemble_moments_serial(const SddeSystem& sys, const SchemeConfig& scheme,
                                     const GridSpec& grid, const InitialSegment& xi,
                                     std::int64_t n_paths, std::uint64_t seed,
                                     const std::optional<Vec>& p) {
    const EnsembleSpec es{sys, scheme, grid, xi, n_paths, seed, p};
    validate_ensemble_args(es);
    const std::int64_t n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;
    std::vector<BlockAccum> blocks(static_cast<std::size_t>(n_blocks));
    for (std::int64_t b = 0; b < n_blocks; ++b)
        accumulate_block(es, b, blocks[static_cast<std::size_t>(b)]);
    return reduce_blocks(es, blocks);
}

DecayFit fit_decay_rate(const MomentSeries& series, double window_fraction) {
    if (series.weighted.empty())
        throw InputError("fit_decay_rate: series has no weighted aggregate");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw InputError("fit_decay_rate: window_fraction must lie in (0, 1]");

    const double horizon = series.times.back();
    const double start = horizon - window_fraction * std::max(horizon, 0.0);

    std::vector<double> ts, ys;
    for (std::int64_t r = 0; r < series.rows(); ++r) {
        const double t = series.times[r];
        const double v = series.weighted[r];
        if (t < start || v <= 1e-300) continue;
        ts.push_back(t);
        ys.push_back(std::log(v));
    }
    if (ts.size() < 3) throw FitError("fit_decay_rate: fewer than 3 usable points in the window");

    const auto n = static_cast<double>(ts.size());
    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= n;
    ybar /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tbar) * (ts[i] - tbar);
        sty += (ts[i] - tbar) * (ys[i] - ybar);
    }
    if (!(stt > 0.0)) throw FitError("fit_decay_rate: degenerate time window");

    DecayFit fit;
    fit.lambda = sty / stt;
    fit.n_points = static_cast<std::int64_t>(ts.size());
    fit.window_start = start;

    double rss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double resid = ys[i] - (ybar + fit.lambda * (ts[i] - tbar));
        rss += resid * resid;
    }
    fit.stderror = ts.size() > 2 ? std::sqrt(rss / (n - 2.0) / stt) : 0.0;
    return fit;
}

Vec as_exponent(const Trajectory& traj, const GridSpec& grid) {
    if (grid.n_steps < 1) throw InputError("as_exponent: needs at least one step");
    const auto xn = traj.state(grid.n_steps);
    const double t = static_cast<double>(grid.n_steps) * grid.delta;
    Vec out(traj.d);
    for (int i = 0; i < traj.d; ++i) {
        const double a = std::fabs(xn[i]);
        out[i] = a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a) / t;
    }
    return out;
}

}  // namespace stabilab
