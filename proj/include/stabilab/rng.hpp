#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace stabilab::rng {

// Philox4x64-10 counter-based generator (Salmon et al., SC'11). A pure
// function of (counter, key): any (stream, index) pair can be evaluated in
// isolation, which is what makes parallel path generation reproducible under
// arbitrary scheduling.

struct Counter {
    std::uint64_t c0 = 0, c1 = 0, c2 = 0, c3 = 0;
};

struct Key {
    std::uint64_t k0 = 0, k1 = 0;
};

std::array<std::uint64_t, 4> philox4x64(Counter ctr, Key key);

/// Maps a 64-bit word to [0, 1) with 53-bit resolution.
inline double to_unit(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

/// Four standard normal variates from one Philox block (two Box-Muller pairs).
std::array<double, 4> gaussian_block(Counter ctr, Key key);

/// Deterministic uniform sample from the Euclidean ball of the given radius;
/// `slot` selects independent draws for the same (seed, index).
void uniform_in_ball(std::uint64_t seed, std::uint64_t index, std::uint64_t slot, double radius,
                     std::span<double> out);

}  // namespace stabilab::rng
