#pragma once

#include <cstdint>

namespace vrp {

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a) noexcept {
  return splitmix64(seed ^ splitmix64(a));
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b) noexcept {
  return hash_combine(hash_combine(seed, a), b);
}

// Maps a 64-bit hash to the open interval (0, 1).
constexpr double open_unit(std::uint64_t h) noexcept {
  return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace vrp
