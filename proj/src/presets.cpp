#include "stabilab/presets.hpp"

#include <cmath>
#include <sstream>

namespace stabilab {

namespace {

// Both preset delays touch zero at isolated times; the floor keeps tau(t)
// inside (0, tau_max] without changing any lag index (floor(tau/delta) is 0
// either way below one stepsize).
constexpr double kDelayFloor = 1e-12;

CoeffBounds shared_bounds() {
    const double a_diag = -399.0 / 5000.0;
    const double a21 = 1.0 / 15625.0;  // 5^-6
    const double b = 1e-4;
    Mat A(2, 2, {a_diag, 2.0, a21, a_diag});
    Mat B(2, 2, {b, b, b, b});
    return {A, B};
}

Preset example1() {
    Preset p;
    p.name = "example1";

    const double c13 = std::sqrt(38.0) / 625.0;
    const double g11 = 2.0 / 3.0;
    const double g22 = std::sqrt(2.0 / 5.0);

    SddeSystem sys;
    sys.d = 2;
    sys.m = 2;
    sys.drift = [c13](std::span<const double> x, std::span<const double> y,
                      std::span<double> out) {
        out[0] = -0.2 * x[0] - (2.0 / 9.0) * x[0] * x[0] * x[0] + 0.8 * x[1] + 1e-4 * y[0] +
                 1e-4 * y[1];
        out[1] = c13 * x[0] - x[1] + 1e-4 * y[0] + 1e-4 * y[1];
    };
    sys.diffusion = [g11, g22](std::span<const double> x, std::span<const double>,
                               std::span<double> out) {
        out[0] = g11 * x[0] * x[0];
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = g22 * x[1];
    };
    sys.delay = {[](double t) { return std::max(0.1 * (1.0 - std::fabs(std::sin(t))), kDelayFloor); },
                 0.1};

    LipschitzModel lm = LipschitzModel::polynomial(3.0, 2.0);
    lm.one_sided_L = 1.0;
    sys.lipschitz_model = lm;
    sys.claimed_bounds = shared_bounds();

    p.system = std::move(sys);
    p.bounds = shared_bounds();
    p.initial = InitialSegment::constant({1.0, 1.0});
    p.claimed_p = {500.0, 1.0};
    p.claimed_epsilon = 499.0 / 1000.0;
    return p;
}

Preset example2() {
    Preset p;
    p.name = "example2";

    const double c13 = std::sqrt(38.0) / 625.0;
    const double gd = std::sqrt(10.0) / 5.0;

    SddeSystem sys;
    sys.d = 2;
    sys.m = 2;
    sys.drift = [c13](std::span<const double> x, std::span<const double> y,
                      std::span<double> out) {
        out[0] = -0.4 * x[0] + 0.8 * x[1] + 1e-4 * y[0] + 1e-4 * y[1];
        out[1] = c13 * x[0] - x[1] + 1e-4 * y[0] + 1e-4 * y[1];
    };
    sys.diffusion = [gd](std::span<const double> x, std::span<const double>,
                         std::span<double> out) {
        out[0] = gd * x[0];
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = gd * x[1];
    };
    sys.delay = {[](double t) { return std::max(0.1 * std::fabs(std::sin(t)), kDelayFloor); }, 0.1};

    LipschitzModel lm = LipschitzModel::global(2.0);
    lm.one_sided_L = 1.0;
    // Row-sum bound on the linear drift coefficients: max_i sum_j |F_ij|.
    lm.drift_linear_K = 0.4 + 0.8 + 1e-4 + 1e-4;
    sys.lipschitz_model = lm;
    sys.claimed_bounds = shared_bounds();

    p.system = std::move(sys);
    p.bounds = shared_bounds();
    p.initial = InitialSegment::constant({1.0, 1.0});
    p.claimed_p = {500.0, 1.0};
    p.claimed_epsilon = 499.0 / 1000.0;
    return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"example1", "example2"}; }

Preset preset(const std::string& name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; valid presets:";
    for (const auto& n : preset_names()) msg << " " << n;
    throw InputError(msg.str());
}

}  // namespace stabilab
