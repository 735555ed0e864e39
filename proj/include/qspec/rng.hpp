#pragma once

#include <cstdint>
#include <random>

namespace qspec::rng {

// splitmix64 mixing step.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based sub-seed derivation: every stochastic consumer derives its
// own seed from (root, stream, counter), so results do not depend on the
// order in which work units execute.
inline std::uint64_t derive(std::uint64_t root, std::uint64_t stream,
                            std::uint64_t counter = 0) {
  std::uint64_t h = splitmix64(root ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ splitmix64(stream));
  h = splitmix64(h ^ splitmix64(counter));
  return h;
}

using Engine = std::mt19937_64;

inline Engine engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1). Derived from the raw 64-bit stream so the
// value sequence is identical across standard library implementations.
inline double uniform(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform(eng);
}

}  // namespace qspec::rng
