#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace ohsent {

/// 64-bit FNV-1a.
constexpr uint64_t fnv1a64(std::string_view bytes) noexcept {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) noexcept : state_(seed) {}

  constexpr uint64_t next() noexcept {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

/// Stage-local seed: stages keyed by name never perturb each other's draws.
constexpr uint64_t derive_seed(uint64_t seed, std::string_view stage) noexcept {
  return SplitMix64(seed ^ fnv1a64(stage)).next();
}

/// xoshiro256** 1.0, state filled from SplitMix64(seed). Bit-exact across
/// platforms, unlike std:: distributions.
class Xoshiro256StarStar {
 public:
  static constexpr std::string_view kName = "xoshiro256**/splitmix64";

  explicit constexpr Xoshiro256StarStar(uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  constexpr uint64_t next() noexcept {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Unbiased integer in [0, bound) by rejection; bound must be > 0.
  constexpr uint64_t below(uint64_t bound) noexcept {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> s_{};
};

}  // namespace ohsent
