#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace macsim {

// All randomness in the library flows from one master seed. Sub-streams are
// derived from (master seed, component name, index) with splitmix64 so that
// parallel work items get independent, reproducible streams no matter how
// they are scheduled. The engine family is std::mt19937_64 and is fixed for
// a release; distribution helpers below are hand-rolled because the standard
// distributions are implementation-defined and would break byte-identical
// artifacts across toolchains.

uint64_t splitmix64(uint64_t& state);

// FNV-1a, used for stream labels and artifact checksums (not cryptographic).
uint64_t fnv1a64(std::string_view bytes);

// Stable key derivation: component label + index -> engine seed.
uint64_t derive_seed(uint64_t master, std::string_view component, uint64_t index);

using Engine = std::mt19937_64;

inline Engine make_engine(uint64_t master, std::string_view component, uint64_t index) {
  return Engine(derive_seed(master, component, index));
}

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Event of probability p, exact at the endpoints: p <= 0 never fires,
// p >= 1 always fires (uniform01 is strictly below 1).
inline bool chance(Engine& eng, double p) {
  return uniform01(eng) < p;
}

// Unbiased integer in [0, n). Lemire's multiply-shift with rejection.
inline uint64_t uniform_below(Engine& eng, uint64_t n) {
  if (n <= 1) return 0;
  unsigned __int128 wide = static_cast<unsigned __int128>(eng()) * n;
  auto low = static_cast<uint64_t>(wide);
  if (low < n) {
    const uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      wide = static_cast<unsigned __int128>(eng()) * n;
      low = static_cast<uint64_t>(wide);
    }
  }
  return static_cast<uint64_t>(wide >> 64);
}

}  // namespace macsim
