#pragma once

#include <cstdint>
#include <random>

namespace logcap {

// splitmix64 step; used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0xda942042e4dd58b5ULL * (index + 1);
  splitmix64(s);
  return splitmix64(s);
}

// Uniform double in [2^-53, 1). std::uniform_real_distribution is not pinned
// by the standard, so draws go through this instead.
inline double u01(std::mt19937_64& eng) {
  double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

}  // namespace logcap
