#include "stabilab/rng.hpp"

#include <cmath>
#include <numbers>

namespace stabilab::rng {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline Counter round_once(const Counter& c, const Key& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMult0, c.c0, hi0, lo0);
    mulhilo(kMult1, c.c2, hi1, lo1);
    return {hi1 ^ c.c1 ^ k.k0, lo1, hi0 ^ c.c3 ^ k.k1, lo0};
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(Counter ctr, Key key) {
    ctr = round_once(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key.k0 += kWeyl0;
        key.k1 += kWeyl1;
        ctr = round_once(ctr, key);
    }
    return {ctr.c0, ctr.c1, ctr.c2, ctr.c3};
}

std::array<double, 4> gaussian_block(Counter ctr, Key key) {
    const auto w = philox4x64(ctr, key);
    std::array<double, 4> z;
    for (int pair = 0; pair < 2; ++pair) {
        // 1 - u lies in (0, 1], keeping the log argument strictly positive.
        const double u1 = 1.0 - to_unit(w[2 * pair]);
        const double u2 = to_unit(w[2 * pair + 1]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        z[2 * pair] = r * std::cos(a);
        z[2 * pair + 1] = r * std::sin(a);
    }
    return z;
}

void uniform_in_ball(std::uint64_t seed, std::uint64_t index, std::uint64_t slot, double radius,
                     std::span<double> out) {
    const int d = static_cast<int>(out.size());
    const Key key{seed, index};

    // Direction: normalized Gaussian vector. Radius: radius * U^(1/d).
    double nrm2 = 0.0;
    for (int i = 0; i < d; i += 4) {
        const auto z = gaussian_block({static_cast<std::uint64_t>(i / 4), slot, 0x62616c6cull, 0}, key);
        for (int j = 0; j < 4 && i + j < d; ++j) {
            out[i + j] = z[j];
            nrm2 += z[j] * z[j];
        }
    }
    const auto w = philox4x64({0xffffffffffffffffull, slot, 0x62616c6cull, 0}, key);
    const double u = to_unit(w[0]);
    const double nrm = std::sqrt(nrm2);
    const double scale = nrm > 0.0 ? radius * std::pow(u, 1.0 / d) / nrm : 0.0;
    for (int i = 0; i < d; ++i) out[i] *= scale;
}

}  // namespace stabilab::rng
