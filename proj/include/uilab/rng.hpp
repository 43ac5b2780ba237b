#pragma once

#include <cstdint>
#include <cmath>

namespace uilab {

// xoshiro256** with splitmix64 seeding. All randomness in the library flows
// through this generator so that runs are bit-reproducible across platforms
// (std::normal_distribution et al. are implementation-defined, so we roll the
// uniform->double mapping and the gaussian transform by hand).
//
// Streams: derive_stream(root, k) gives an independent generator per stream
// index; the same (root, k) always yields the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { seed_state(seed); }

  static Rng derive_stream(std::uint64_t root_seed, std::uint64_t stream) {
    // Mix the stream index into the root with splitmix64 steps; distinct
    // streams land in unrelated regions of the state space.
    std::uint64_t x = root_seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    return Rng(splitmix64(x) ^ splitmix64(x + 0xBF58476D1CE4E5B9ULL));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n) via rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool coin() { return (next_u64() >> 63) != 0; }

  // Standard normal via Box-Muller; pairs are generated together and the
  // second value cached, so draw order is part of the reproducible stream.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t splitmix64(std::uint64_t&& x) {
    std::uint64_t y = x;
    return splitmix64(y);
  }

  void seed_state(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace uilab
