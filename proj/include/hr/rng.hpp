#pragma once
// Deterministic seeded randomness.  Every stochastic object derives its draws
// from a (seed, purpose, channel) triple so results are reproducible across
// runs, platforms and thread counts.  We roll our own Gaussian (Box-Muller on
// 53-bit uniforms) because std::normal_distribution is implementation-defined
// and would break bit-level reproducibility across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace hr {

// SplitMix64 finalizer; used to derive well-separated sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t purpose,
                                    std::uint64_t channel) {
  std::uint64_t s = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
  s = splitmix64(s ^ purpose);
  s = splitmix64(s ^ (0x100000001b3ULL * (channel + 1)));
  return s;
}

class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t channel)
      : eng_(substream_seed(seed, purpose, channel)) {}

  // Uniform draw in [0, 1) with 53 random bits.
  double uniform01() { return std::ldexp(static_cast<double>(eng_() >> 11), -53); }

  // Standard normal draw.
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    // 1 - u1 lies in (0, 1], so the log is finite.
    const double rad = std::sqrt(-2.0 * std::log1p(-u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hr
