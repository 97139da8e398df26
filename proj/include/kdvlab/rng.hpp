#pragma once
#include <cstdint>

namespace kdvlab {

/** Deterministic, platform-independent PRNG: xoshiro256** seeded through
 * splitmix64.  Fixed here (rather than std::mt19937 + distributions, whose
 * double output is not pinned by the standard) so synthesized data is
 * bit-for-bit reproducible everywhere.
 */
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

struct Xoshiro256StarStar {
  uint64_t s[4];

  explicit Xoshiro256StarStar(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s) word = sm.next();
  }

  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t next() {
    uint64_t result = rotl(s[1] * 5, 7) * 9;
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace kdvlab
