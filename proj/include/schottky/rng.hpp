#pragma once

#include <cstdint>
#include <random>

namespace schottky {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for item `index` of a run seeded with `seed`, so that
/// parallel maps draw the same numbers regardless of scheduling.
inline std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index,
                                  std::uint64_t salt = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(salt)) + index));
}

}  // namespace schottky
