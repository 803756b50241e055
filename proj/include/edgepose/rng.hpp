#ifndef EDGEPOSE_RNG_HPP
#define EDGEPOSE_RNG_HPP

#include <cstdint>
#include <random>

namespace edgepose {

// splitmix64 finalizer; used to derive decorrelated substream seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream));
}

// Independent engine for (seed, stream); streams are stable across
// fan-out widths, so parallel consumers stay reproducible.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

}  // namespace edgepose

#endif
