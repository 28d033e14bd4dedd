#pragma once

#include <cstdint>

namespace gatefi {

// Counter-based generator: every value is a pure function of
// (seed, stream, draw), so any draw can be reproduced without replaying
// the ones before it and concurrent workers never share generator state.
// The mixing function is the SplitMix64 finalizer applied to a combined key.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t draw) const {
    return mix(mix(mix(seed_) ^ stream) ^ (draw * 0xd1b54a32d192ed03ULL));
  }

  // Uniform in [0, bound) by multiply-shift; bias is below bound / 2^64.
  std::uint64_t uniform(std::uint64_t stream, std::uint64_t draw, std::uint64_t bound) const {
    __extension__ using u128 = unsigned __int128;
    const u128 wide = static_cast<u128>(bits(stream, draw)) * static_cast<u128>(bound);
    return static_cast<std::uint64_t>(wide >> 64);
  }

  constexpr std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace gatefi
