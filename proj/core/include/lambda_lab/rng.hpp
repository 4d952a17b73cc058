#pragma once

#include <cstdint>

// Counter-based random numbers: every draw is a pure function of its key, so
// results do not depend on how work is split across threads.

namespace lambda_lab {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b = 0,
                                     std::uint64_t c = 0) noexcept {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ a);
  h = mix64(h ^ (b + 0x2545f4914f6cdd1dULL));
  h = mix64(h ^ (c + 0x14057b7ef767814fULL));
  return h;
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0,
                                 std::uint64_t c = 0) noexcept {
  return static_cast<double>(counter_hash(seed, a, b, c) >> 11) * 0x1.0p-53;
}

/// Child seed for an independent sub-stream (cap, arc, trial, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t index = 0) noexcept {
  return counter_hash(seed, 0xd1b54a32d192ed03ULL ^ tag, index, 0x9e37);
}

}  // namespace lambda_lab
