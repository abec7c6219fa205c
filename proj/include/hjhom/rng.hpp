// SPDX-License-Identifier: Apache-2.0
//
// Counter-based deterministic RNG. Every draw is a pure function of
// (key, counter), so concurrent samplers never share mutable state.

#pragma once

#include <cstdint>

namespace hjhom {

// splitmix64 finalizer, used as the mixing core.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless draw: uniform 64-bit value for a (seed, stream, counter) triple.
constexpr std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t counter) {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc908ULL) ^ mix64(stream) + counter * 0x9e3779b97f4a7c15ULL);
}

// Uniform double in [0, 1).
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) {
    return static_cast<double>(counter_u64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace hjhom
