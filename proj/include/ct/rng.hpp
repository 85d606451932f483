#pragma once

// Deterministic 64-bit generator (splitmix64). Every randomized component
// takes one of these seeded explicitly, so runs are reproducible per seed
// and shardable across workers without shared state.

#include <cstdint>

namespace ct {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n = 0 yields 0. Modulo bias is negligible here.
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace ct
