#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dynsparse {

// splitmix64: used to decorrelate derived seeds (Vigna, 2015).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
  // FNV-1a, folded through splitmix for avalanche.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

// All randomness in the library flows from one master seed through named
// substreams, so parallel replicates stay reproducible regardless of
// scheduling.
inline std::mt19937_64 make_rng(std::uint64_t master_seed, std::string_view stream,
                                std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(master_seed ^ hash_name(stream));
  s = splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return std::mt19937_64(s);
}

}  // namespace dynsparse
