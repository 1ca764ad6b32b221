#include "macsim/rng.hpp"

namespace macsim {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t derive_seed(uint64_t master, std::string_view component, uint64_t index) {
  uint64_t state = master ^ fnv1a64(component);
  uint64_t mixed = splitmix64(state);
  state = mixed ^ index;
  return splitmix64(state);
}

}  // namespace macsim
