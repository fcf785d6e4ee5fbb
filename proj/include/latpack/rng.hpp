#pragma once

#include <cstdint>

namespace latpack {

// Splittable deterministic generator. All randomized pipelines derive their
// randomness from one 64-bit seed through split(); no ambient entropy.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Child stream independent of subsequent next() calls on the parent.
  SplitMix64 split() { return SplitMix64(next() ^ 0x5851f42d4c957f2dull); }

  // Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = -bound % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return (next() >> 11) * 0x1.0p-53 < p;
  }

  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace latpack
