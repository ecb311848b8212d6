#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace trigroup {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Order-sensitive stable hash of a tuple of 64-bit words; used to derive
/// independent per-trial streams from (master seed, cell, index).
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ull;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, double c, std::uint64_t index) {
  return mix_seed({master, a, std::bit_cast<std::uint64_t>(c), index});
}

/// Uniform double in [0, 1) from a hashed counter.
inline double unit_from_hash(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

}  // namespace trigroup
