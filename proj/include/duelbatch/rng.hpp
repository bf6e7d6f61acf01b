#pragma once

#include <cstdint>

namespace duelbatch::rng {

// SplitMix64 finalizer; bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keyed counter hash.  Every output is a pure function of (seed, a, b, c),
// so a draw never depends on how many draws preceded it.  That keeps one
// pair's outcome stream stable when the rest of a batch plan changes.
inline constexpr std::uint64_t hash4(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b, std::uint64_t c) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double u01(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Domain tags: consumers of the same root seed get disjoint streams.
inline constexpr std::uint64_t kDuelTag = 0x6475656c'30303031ULL;
inline constexpr std::uint64_t kMatrixTag = 0x6d617472'30303031ULL;

}  // namespace duelbatch::rng
