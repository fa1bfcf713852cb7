#pragma once

#include <cstdint>

namespace meanreflect::rng {

// Counter-based stream: every draw is a pure function of
// (seed, particle, step, slot). No state is carried between draws, so
// increments can be regenerated in any order (or aggregated across
// refinement levels) and always reproduce bit-identically.
struct Key {
    std::uint64_t seed = 0;
    std::uint64_t particle = 0;
    std::uint32_t step = 0;
    std::uint32_t slot = 0;
};

// Step id reserved for initial-condition draws (never a scheme step).
inline constexpr std::uint32_t kInitStep = 0xFFFFFFFFu;

// Philox4x32-10 block cipher applied to (slot, step, particle) under the
// 64-bit seed key; returns the first 64 bits of the 128-bit block.
std::uint64_t random_bits(const Key& key);

// Uniform draw in the open interval (0, 1).
double uniform01(const Key& key);

// Uniform draw in (a, b).
double uniform(const Key& key, double a, double b);

// Standard normal via the inverse CDF (Wichura's PPND16), one draw per key.
double normal01(const Key& key);

// Poisson count by CDF inversion from a single uniform; intended for the
// small per-step means of grid schemes.
std::uint64_t poisson(const Key& key, double mean);

}  // namespace meanreflect::rng
