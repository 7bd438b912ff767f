#pragma once

#include <cstdint>

// Counter-based keyed pseudorandom function. Every uniform the toolkit
// consumes is a pure function of (stream key, counter), which is what makes
// clock realizations reproducible, prefix-consistent and shift-consistent
// with no stored state.
namespace contact::prf {

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr uint64_t mix(uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Absorb one word into a running stream key.
constexpr uint64_t absorb(uint64_t h, uint64_t w) noexcept {
  return mix((h + kGolden) ^ w);
}

// i-th word of the keyed counter stream (the SplitMix64 sequence at `key`).
constexpr uint64_t at(uint64_t key, uint64_t i) noexcept {
  return mix(key + (i + 1) * kGolden);
}

// Uniform on the open interval (0,1): 53 mantissa bits offset by half an ulp.
inline double uniform_open(uint64_t key, uint64_t i) noexcept {
  return (static_cast<double>(at(key, i) >> 11) + 0.5) * 0x1.0p-53;
}

// Per-replica seeds for Monte Carlo loops.
constexpr uint64_t derive_seed(uint64_t base_seed, uint64_t index) noexcept {
  return absorb(absorb(0x7265706c696361ull, base_seed), index);
}

}  // namespace contact::prf
