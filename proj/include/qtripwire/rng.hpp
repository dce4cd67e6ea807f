#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// mt19937_64 output is pinned by the standard, but the standard library
// DISTRIBUTIONS are not; these conversions are fixed here so a given seed
// reproduces byte-identical streams on any platform.

namespace qtw {

// uniform in [0, 1), 53 random bits
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// inverse-CDF exponential; log1p keeps small gaps accurate
inline double exponential_gap(std::mt19937_64& gen, double rate) {
  return -std::log1p(-uniform01(gen)) / rate;
}

inline bool bernoulli(std::mt19937_64& gen, double p) {
  return uniform01(gen) < p;
}

// splitmix64 finalizer: one base seed -> decorrelated per-stream seeds
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace qtw
