#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stabilab/montecarlo.hpp"
#include "stabilab/presets.hpp"
#include "test_util.hpp"

using namespace stabilab;

namespace {

struct ZeroNoise final : NoiseSource {
    void fill(std::int64_t, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
};

bool series_equal(const MomentSeries& a, const MomentSeries& b) {
    return a.times == b.times && a.component_moments == b.component_moments &&
           a.weighted == b.weighted && a.weighted_se == b.weighted_se && a.n_alive == b.n_alive &&
           a.n_paths == b.n_paths && a.n_diverged == b.n_diverged;
}

SddeSystem cubic_explosive() {
    SddeSystem sys;
    sys.d = 1;
    sys.m = 1;
    sys.drift = [](std::span<const double> x, std::span<const double>, std::span<double> out) {
        out[0] = x[0] * x[0] * x[0];
    };
    sys.diffusion = [](std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    sys.delay = DelayFunction::constant(0.1);
    return sys;
}

}  // namespace

TEST_CASE("noiseless ensemble equals the squared deterministic path") {
    SddeSystem sys = testutil::scalar_system(-1.0, 0.0, 0.1);
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 1, 50);
    const InitialSegment one = InitialSegment::constant({1.0});

    const Trajectory det = integrate_path(sys, SchemeConfig::em(), grid, one, ZeroNoise{});
    for (std::int64_t paths : {1, 7, 64}) {
        const MomentSeries s =
            ensemble_moments(sys, SchemeConfig::em(), grid, one, paths, 5, Vec{1.0});
        REQUIRE(s.rows() == 52);
        for (std::int64_t k = -1; k <= 50; ++k) {
            const double x = det.state(k)[0];
            // Averaging n identical values reassociates the sum, so exactness
            // holds only up to accumulation ulps.
            CHECK(s.component_moments[0][k + 1] == doctest::Approx(x * x).epsilon(1e-13));
        }
        CHECK(s.n_diverged == 0);
    }
}

TEST_CASE("zero initial data stays at zero for every scheme") {
    const Preset p = preset("example1");
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 10, 40);
    const InitialSegment zero = InitialSegment::zero(2);
    const SchemeConfig configs[] = {
        SchemeConfig::em(), SchemeConfig::theta_em(0.5),
        SchemeConfig::mtem(TruncationConfig::for_model(p.system.lipschitz_model))};
    for (const auto& cfg : configs) {
        const MomentSeries s = ensemble_moments(p.system, cfg, grid, zero, 16, 9, Vec{1.0, 1.0});
        for (int i = 0; i < 2; ++i)
            for (double v : s.component_moments[i]) CHECK(v == 0.0);
        for (double v : s.weighted) CHECK(v == 0.0);
    }
}

TEST_CASE("em moments track the exact linear recursion within 3 standard errors") {
    SddeSystem sys = testutil::scalar_system(-1.0, 0.5, 0.01);
    const GridSpec grid = GridSpec::from_delay_steps(0.01, 1, 300);
    const MomentSeries s = ensemble_moments(sys, SchemeConfig::em(), grid,
                                            InitialSegment::constant({1.0}), 2000, 2718, Vec{1.0});
    const double ratio = (1.0 - 0.01) * (1.0 - 0.01) + 0.25 * 0.01;
    double exact = 1.0;
    for (std::int64_t k = 0; k <= 300; ++k) {
        const double est = s.weighted[k + 1];
        const double se = s.weighted_se[k + 1];
        CHECK(std::fabs(est - exact) <= 3.0 * se + 1e-12);
        exact *= ratio;
    }
}

TEST_CASE("standard errors shrink like one over sqrt(paths)") {
    SddeSystem sys = testutil::scalar_system(-1.0, 0.5, 0.01);
    const GridSpec grid = GridSpec::from_delay_steps(0.01, 1, 100);
    const InitialSegment one = InitialSegment::constant({1.0});
    const MomentSeries small = ensemble_moments(sys, SchemeConfig::em(), grid, one, 1000, 7, Vec{1.0});
    const MomentSeries big = ensemble_moments(sys, SchemeConfig::em(), grid, one, 4000, 7, Vec{1.0});
    // Expected ratio is 0.5; allow generous statistical slack.
    double ratio_sum = 0.0;
    int n = 0;
    for (std::int64_t k = 20; k <= 100; k += 20) {
        ratio_sum += big.weighted_se[k + 1] / small.weighted_se[k + 1];
        ++n;
    }
    const double mean_ratio = ratio_sum / n;
    CHECK(mean_ratio < 0.65);
    CHECK(mean_ratio > 0.35);
}

TEST_CASE("serial reference and openmp kernel agree bitwise") {
    const Preset p = preset("example1");
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 10, 100);
    const SchemeConfig configs[] = {
        SchemeConfig::em(), SchemeConfig::theta_em(1.0),
        SchemeConfig::mtem(TruncationConfig::for_model(p.system.lipschitz_model))};
    for (const auto& cfg : configs) {
        const MomentSeries par =
            ensemble_moments(p.system, cfg, grid, p.initial, 100, 99, Vec{345.0, 13.0});
        const MomentSeries ser =
            ensemble_moments_serial(p.system, cfg, grid, p.initial, 100, 99, Vec{345.0, 13.0});
        CHECK(series_equal(par, ser));
    }
}

TEST_CASE("worker count does not change the output bits") {
    const Preset p = preset("example2");
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 10, 120);
    const MomentSeries one =
        ensemble_moments(p.system, SchemeConfig::theta_em(0.25), grid, p.initial, 90, 3, Vec{1.0, 1.0}, 1);
    const MomentSeries four =
        ensemble_moments(p.system, SchemeConfig::theta_em(0.25), grid, p.initial, 90, 3, Vec{1.0, 1.0}, 4);
    CHECK(series_equal(one, four));

    // And repeated runs reproduce themselves.
    const MomentSeries again =
        ensemble_moments(p.system, SchemeConfig::theta_em(0.25), grid, p.initial, 90, 3, Vec{1.0, 1.0}, 4);
    CHECK(series_equal(four, again));
}

TEST_CASE("noise streams do not depend on the scheme") {
    // Inside the truncation ball MTEM and EM take identical steps, so with
    // shared (seed, path, step) streams the two ensembles must agree bitwise.
    Preset p = preset("example1");
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 10, 60);
    const InitialSegment tiny = InitialSegment::constant({0.01, 0.01});
    const auto trunc = TruncationConfig::for_model(p.system.lipschitz_model);
    const MomentSeries em =
        ensemble_moments(p.system, SchemeConfig::em(), grid, tiny, 64, 31, Vec{1.0, 1.0});
    const MomentSeries mtem =
        ensemble_moments(p.system, SchemeConfig::mtem(trunc), grid, tiny, 64, 31, Vec{1.0, 1.0});
    CHECK(series_equal(em, mtem));
}

TEST_CASE("diverged paths are excluded and counted") {
    SddeSystem sys = cubic_explosive();
    sys.diffusion = [](std::span<const double> x, std::span<const double>, std::span<double> out) {
        out[0] = 2.0 * x[0] * x[0];
    };
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 1, 200);
    const MomentSeries s = ensemble_moments(sys, SchemeConfig::em(), grid,
                                            InitialSegment::constant({3.0}), 200, 17, Vec{1.0});
    CHECK(s.n_diverged > 0);
    CHECK(s.n_diverged < 200);  // the seed keeps some paths alive
    CHECK(s.n_alive.back() == 200 - s.n_diverged);
    for (std::size_t r = 1; r < s.n_alive.size(); ++r) CHECK(s.n_alive[r] <= s.n_alive[r - 1]);
    for (double v : s.weighted) CHECK(std::isfinite(v));
}

TEST_CASE("ensemble fails loudly when every path diverges") {
    const SddeSystem sys = cubic_explosive();
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 1, 100);
    CHECK_THROWS_AS(ensemble_moments(sys, SchemeConfig::em(), grid,
                                     InitialSegment::constant({10.0}), 4, 1, Vec{1.0}),
                    EstimationError);
}

TEST_CASE("moment series invariants on a generic run") {
    const Preset p = preset("example1");
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 10, 150);
    const MomentSeries s = ensemble_moments(
        p.system, SchemeConfig::mtem(TruncationConfig::for_model(p.system.lipschitz_model)), grid,
        p.initial, 128, 12345, Vec{345.0, 13.0});
    for (std::size_t r = 1; r < s.times.size(); ++r) CHECK(s.times[r] > s.times[r - 1]);
    for (int i = 0; i < s.dim(); ++i)
        for (double v : s.component_moments[i]) CHECK(v >= 0.0);
    CHECK(s.rows() == 161);
    CHECK(s.times.front() == doctest::Approx(-0.1));
    CHECK(s.times.back() == doctest::Approx(1.5));
}

TEST_CASE("fit recovers exact exponential decay") {
    MomentSeries s;
    s.m_bar = 0;
    s.delta = 0.05;
    for (int k = 0; k <= 200; ++k) {
        const double t = 0.05 * k;
        s.times.push_back(t);
        s.weighted.push_back(2.0 * std::exp(-0.5 * t));
    }
    s.component_moments.assign(1, s.weighted);
    s.weighted_se.assign(s.weighted.size(), 0.0);
    s.n_alive.assign(s.weighted.size(), 100);

    const DecayFit fit = fit_decay_rate(s, 0.5);
    CHECK(std::fabs(fit.lambda + 0.5) <= 1e-12);
    CHECK(fit.stderror <= 1e-12);
    CHECK(fit.window_start == doctest::Approx(5.0));

    // Constant series: slope zero.
    MomentSeries c = s;
    std::fill(c.weighted.begin(), c.weighted.end(), 3.0);
    CHECK(std::fabs(fit_decay_rate(c, 1.0).lambda) <= 1e-12);
}

TEST_CASE("fit tolerates multiplicative noise") {
    MomentSeries s;
    s.m_bar = 0;
    s.delta = 0.05;
    std::mt19937 gen(606);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k <= 400; ++k) {
        const double t = 0.05 * k;
        s.times.push_back(t);
        s.weighted.push_back(std::exp(-0.5 * t) * (1.0 + 0.01 * u(gen)));
    }
    s.component_moments.assign(1, s.weighted);
    s.weighted_se.assign(s.weighted.size(), 0.0);
    s.n_alive.assign(s.weighted.size(), 100);
    const DecayFit fit = fit_decay_rate(s, 0.5);
    CHECK(std::fabs(fit.lambda + 0.5) <= 0.05);
}

TEST_CASE("fit error paths") {
    MomentSeries s;
    s.m_bar = 0;
    s.delta = 1.0;
    s.times = {0.0, 1.0, 2.0};
    s.weighted = {1.0, 1e-310, 1e-320};  // underflowed rows are skipped
    s.component_moments.assign(1, s.weighted);
    s.weighted_se.assign(3, 0.0);
    s.n_alive.assign(3, 10);
    CHECK_THROWS_AS(fit_decay_rate(s, 1.0), FitError);
    CHECK_THROWS_AS(fit_decay_rate(s, 0.0), InputError);
    CHECK_THROWS_AS(fit_decay_rate(s, 1.5), InputError);

    MomentSeries empty;
    CHECK_THROWS_AS(fit_decay_rate(empty, 0.5), InputError);
}

TEST_CASE("terminal pathwise exponents") {
    SddeSystem sys = testutil::scalar_system(-1.0, 0.0, 0.1);
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 1, 100);
    const InitialSegment one = InitialSegment::constant({1.0});

    // Deterministic X_k = e^{-k delta} has exponent exactly -1.
    Trajectory traj;
    traj.reset(1, grid);
    for (std::int64_t k = -1; k <= 100; ++k)
        traj.state_mut(k)[0] = std::exp(-static_cast<double>(k) * grid.delta);
    CHECK(as_exponent(traj, grid)[0] == doctest::Approx(-1.0).epsilon(1e-12));

    // Backward Euler with a = -1: exponent log(1.1^{-100}) / 10.
    const Trajectory be = integrate_path(sys, SchemeConfig::theta_em(1.0), grid, one, ZeroNoise{});
    CHECK(as_exponent(be, grid)[0] == doctest::Approx(-10.0 * std::log(1.1)).epsilon(1e-9));

    // Terminal value one has exponent zero; exact zero maps to -infinity.
    for (std::int64_t k = -1; k <= 100; ++k) traj.state_mut(k)[0] = 1.0;
    CHECK(as_exponent(traj, grid)[0] == 0.0);
    traj.state_mut(100)[0] = 0.0;
    CHECK(std::isinf(as_exponent(traj, grid)[0]));
    CHECK(as_exponent(traj, grid)[0] < 0.0);

    const GridSpec empty = GridSpec::from_delay_steps(0.1, 1, 0);
    Trajectory t0;
    t0.reset(1, empty);
    CHECK_THROWS_AS(as_exponent(t0, empty), InputError);
}

TEST_CASE("ensemble argument validation") {
    const Preset p = preset("example1");
    const GridSpec grid = GridSpec::from_delay_steps(0.1, 10, 10);
    CHECK_THROWS_AS(
        ensemble_moments(p.system, SchemeConfig::em(), grid, p.initial, 0, 1, std::nullopt),
        InputError);
    CHECK_THROWS_AS(ensemble_moments(p.system, SchemeConfig::em(), grid, p.initial, 4, 1,
                                     Vec{1.0, -1.0}),
                    InputError);
    CHECK_THROWS_AS(ensemble_moments(p.system, SchemeConfig::em(), grid, p.initial, 4, 1,
                                     Vec{1.0}),
                    InputError);
}
