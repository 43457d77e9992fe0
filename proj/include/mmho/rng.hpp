#pragma once

// Counter-based stream derivation. Every random quantity in a simulation is
// drawn from a generator whose seed is a hash of (master seed, purpose tag,
// indices), so results never depend on the order in which streams are used.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmho {

using Rng = std::mt19937_64;

enum class StreamTag : std::uint64_t {
  trajectory = 1,
  channel = 2,
  rate_threshold = 3,
  exploration = 4,
  baseline = 5,
  network_init = 6,
  replay = 7,
  episode = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag,
                                 std::initializer_list<std::uint64_t> counters = {}) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag)));
  for (auto c : counters) h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t seed, StreamTag tag,
                       std::initializer_list<std::uint64_t> counters = {}) {
  return Rng(derive_seed(seed, tag, counters));
}

}  // namespace mmho
