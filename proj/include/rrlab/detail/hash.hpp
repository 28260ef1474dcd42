#pragma once

#include <cstdint>

namespace rrlab::detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

// Maps a 64-bit hash to a Bernoulli(probability) outcome. probability 0 is
// never, 1 is always.
inline bool bernoulli(std::uint64_t h, double probability) {
  if (probability <= 0.0) return false;
  if (probability >= 1.0) return true;
  return static_cast<double>(h >> 11) * 0x1.0p-53 < probability;
}

}  // namespace rrlab::detail
