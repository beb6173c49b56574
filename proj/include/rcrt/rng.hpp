// rng.hpp
// Counter-based derivation of independent per-trial generator streams.
#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace rcrt {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream for (seed, snr, trial); independent of execution order.
inline Rng trial_rng(std::uint64_t master_seed, double snr_db,
                     std::uint64_t trial_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(snr_db));
  h = splitmix64(h ^ trial_index);
  return Rng(h);
}

}  // namespace rcrt
