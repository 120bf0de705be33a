#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stabilab/model.hpp"
#include "stabilab/presets.hpp"

using namespace stabilab;

TEST_CASE("example1 drift values") {
    const Preset p = preset("example1");
    const Vec f = eval_drift(p.system, Vec{1.0, 1.0}, Vec{0.0, 0.0});
    // -1/5 - 2/9 + 4/5 and sqrt(38)/625 - 1
    CHECK(f[0] == doctest::Approx(0.37778).epsilon(1e-4));
    CHECK(f[1] == doctest::Approx(-0.99014).epsilon(1e-4));

    const Vec zero = eval_drift(p.system, Vec{0.0, 0.0}, Vec{0.0, 0.0});
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);
}

TEST_CASE("example diffusion values") {
    const Preset p1 = preset("example1");
    const Mat g = eval_diffusion(p1.system, Vec{3.0, 1.0}, Vec{0.0, 0.0});
    CHECK(g(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(g(1, 1) == doctest::Approx(0.63246).epsilon(1e-4));
    CHECK(g(0, 1) == 0.0);
    CHECK(g(1, 0) == 0.0);

    const Mat z = eval_diffusion(p1.system, Vec{0.0, 0.0}, Vec{0.0, 0.0});
    for (double v : z.data()) CHECK(v == 0.0);

    const Preset p2 = preset("example2");
    const Mat g2 = eval_diffusion(p2.system, Vec{1.0, 1.0}, Vec{0.0, 0.0});
    CHECK(g2(0, 0) == doctest::Approx(std::sqrt(10.0) / 5.0).epsilon(1e-14));
    CHECK(g2(1, 1) == doctest::Approx(std::sqrt(10.0) / 5.0).epsilon(1e-14));
}

TEST_CASE("scalar linear drift") {
    SddeSystem sys;
    sys.d = 1;
    sys.m = 1;
    sys.drift = [](std::span<const double> x, std::span<const double>, std::span<double> out) {
        out[0] = -x[0];
    };
    sys.diffusion = [](std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    sys.delay = DelayFunction::constant(1.0);
    CHECK(eval_drift(sys, Vec{2.0}, Vec{7.0})[0] == -2.0);
    CHECK_THROWS_AS(eval_drift(sys, Vec{1.0, 2.0}, Vec{0.0}), InputError);
}

TEST_CASE("drift evaluation is pure") {
    const Preset p = preset("example1");
    const Vec x{0.3, -1.7}, y{2.2, 0.05};
    const Vec a = eval_drift(p.system, x, y);
    const Vec b = eval_drift(p.system, x, y);
    CHECK(a == b);
    const Mat ga = eval_diffusion(p.system, x, y);
    const Mat gb = eval_diffusion(p.system, x, y);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(ga(i, j) == gb(i, j));
}

TEST_CASE("delay functions stay inside (0, tau_max]") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> t_dist(0.0, 50.0);
    for (const char* name : {"example1", "example2"}) {
        const Preset p = preset(name);
        for (int i = 0; i < 10000; ++i) {
            const double tau = p.system.delay.evaluate(t_dist(gen));
            CHECK(tau > 0.0);
            CHECK(tau <= p.system.delay.tau_max);
        }
    }
}

TEST_CASE("grid spec delta times m_bar recovers tau") {
    std::mt19937 gen(11);
    std::uniform_int_distribution<std::int64_t> mdist(1, 1000000);
    for (int i = 0; i < 200; ++i) {
        const std::int64_t m_bar = mdist(gen);
        const GridSpec g = GridSpec::from_delay_steps(0.1, m_bar, 1);
        CHECK(std::fabs(g.delta * static_cast<double>(m_bar) - 0.1) <= 1e-14 * 0.1);
    }
    CHECK_THROWS_AS(GridSpec::from_delay_steps(0.1, 0, 1), InputError);
    CHECK_THROWS_AS(GridSpec::from_delay_steps(-1.0, 10, 1), InputError);
}

TEST_CASE("coefficient bounds validate signs") {
    CHECK_THROWS_AS(CoeffBounds(Mat(2, 2, {-1.0, -0.5, 0.0, -1.0}), Mat(2, 2)), InputError);
    CHECK_THROWS_AS(CoeffBounds(Mat(2, 2, {-1.0, 0.0, 0.0, -1.0}), Mat(2, 2, {0.0, -0.1, 0.0, 0.0})),
                    InputError);
    const CoeffBounds ok(Mat(2, 2, {-1.0, 0.5, 0.25, -2.0}), Mat(2, 2, {0.1, 0.1, 0.1, 0.1}));
    CHECK(ok.dim() == 2);
}

TEST_CASE("lipschitz model growth") {
    const LipschitzModel poly = LipschitzModel::polynomial(3.0, 2.0);
    CHECK(poly.lipschitz_at(2.0) == doctest::Approx(15.0));
    const LipschitzModel glob = LipschitzModel::global(2.0);
    CHECK(glob.lipschitz_at(100.0) == 2.0);
    CHECK_THROWS_AS(LipschitzModel::polynomial(-1.0, 2.0), InputError);
}

TEST_CASE("unknown preset lists valid names") {
    CHECK_THROWS_WITH_AS(preset("nope"),
                         "unknown preset 'nope'; valid presets: example1 example2", InputError);
}
