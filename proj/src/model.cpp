#include "stabilab/model.hpp"

#include <cmath>
#include <utility>

namespace stabilab {

LipschitzModel LipschitzModel::global(double L) {
    if (L < 0.0) throw InputError("LipschitzModel: L must be >= 0");
    LipschitzModel m;
    m.kind = Kind::Global;
    m.L = L;
    return m;
}

LipschitzModel LipschitzModel::polynomial(double c, double q) {
    if (c < 0.0 || q < 0.0) throw InputError("LipschitzModel: c and q must be >= 0");
    LipschitzModel m;
    m.kind = Kind::Polynomial;
    m.c = c;
    m.q = q;
    return m;
}

CoeffBounds::CoeffBounds(Mat a, Mat b) : A(std::move(a)), B(std::move(b)) {
    const int d = A.rows();
    if (A.cols() != d || B.rows() != d || B.cols() != d)
        throw InputError("CoeffBounds: A and B must be square with matching dimension");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i != j && A(i, j) < 0.0)
                throw InputError("CoeffBounds: off-diagonal a_ij must be >= 0");
            if (B(i, j) < 0.0) throw InputError("CoeffBounds: b_ij must be >= 0");
        }
}

Vec eval_drift(const SddeSystem& sys, std::span<const double> x, std::span<const double> y) {
    if (static_cast<int>(x.size()) != sys.d || static_cast<int>(y.size()) != sys.d)
        throw InputError("eval_drift: state length does not match system dimension");
    Vec out(sys.d);
    sys.drift(x, y, out);
    return out;
}

Mat eval_diffusion(const SddeSystem& sys, std::span<const double> x, std::span<const double> y) {
    if (static_cast<int>(x.size()) != sys.d || static_cast<int>(y.size()) != sys.d)
        throw InputError("eval_diffusion: state length does not match system dimension");
    Mat out(sys.d, sys.m);
    sys.diffusion(x, y, out.data());
    return out;
}

InitialSegment InitialSegment::constant(Vec value) {
    return {[v = std::move(value)](double, std::span<double> out) {
                std::copy(v.begin(), v.end(), out.begin());
            },
            std::nullopt};
}

InitialSegment InitialSegment::zero(int d) {
    return constant(Vec(static_cast<std::size_t>(d), 0.0));
}

GridSpec GridSpec::from_delay_steps(double tau_max, std::int64_t m_bar, std::int64_t n_steps) {
    if (!(tau_max > 0.0) || !std::isfinite(tau_max))
        throw InputError("GridSpec: tau_max must be positive and finite");
    if (m_bar < 1) throw InputError("GridSpec: m_bar must be a positive integer");
    if (n_steps < 0) throw InputError("GridSpec: n_steps must be >= 0");
    GridSpec g;
    g.m_bar = m_bar;
    g.delta = tau_max / static_cast<double>(m_bar);
    g.n_steps = n_steps;
    g.horizon = static_cast<double>(n_steps) * g.delta;
    return g;
}

}  // namespace stabilab
