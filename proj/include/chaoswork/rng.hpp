#pragma once

#include <cstdint>
#include <random>

namespace chaoswork {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based randomness: engine(i) depends only on (seed, salt, i), so any
/// index can be replayed and evaluation order never matters. The salt keeps
/// independent streams (initial conditions, free-energy positions, bootstrap)
/// from sharing draws under one user seed.
struct SampleStream {
  std::uint64_t seed = 0;
  std::uint64_t salt = 0;

  std::mt19937_64 engine(std::uint64_t index) const {
    const std::uint64_t a = detail::splitmix64(seed ^ detail::splitmix64(salt));
    const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
    return std::mt19937_64(seq);
  }

  SampleStream with_salt(std::uint64_t s) const { return {seed, s}; }
};

namespace salts {
inline constexpr std::uint64_t kInitialConditions = 1;
inline constexpr std::uint64_t kFreeEnergy = 2;
inline constexpr std::uint64_t kBootstrap = 3;
}  // namespace salts

}  // namespace chaoswork
