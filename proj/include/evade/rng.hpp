#pragma once

// Deterministic random number plumbing. Every stochastic object in the
// simulator draws from a stream derived by integer mixing from a master
// seed plus identifying words (trial index, site coordinates, particle
// index), so that realizations are reproducible and couplings (thinning,
// shared phantom draws) line up across runs regardless of window size or
// thread count.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace evade::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Stream derivation: h <- mix64(h ^ (w + golden + (h<<6) + (h>>2))).
inline constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t w) {
  return mix64(h ^ (w + kGolden + (h << 6) + (h >> 2)));
}

inline constexpr std::uint64_t stream_seed(std::uint64_t seed,
                                           std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(seed + kGolden);
  for (std::uint64_t w : words) h = combine(h, w);
  return h;
}

// Signed coordinates fold into stream words without collisions.
inline constexpr std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

// xoshiro256++ (Blackman & Vigna), seeded by SplitMix64 expansion.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += kGolden;
      w = mix64(x);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit resolution.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0,1); safe under log().
  double u01_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(u01_open()) / rate; }

  // Unbiased integer in [0, n) by rejection.
  std::uint32_t below(std::uint32_t n) {
    const std::uint64_t span = (0x100000000ull / n) * n;
    for (;;) {
      const std::uint64_t x = next() >> 32;
      if (x < span) return static_cast<std::uint32_t>(x % n);
    }
  }

  // Two independent standard normals (polar Box-Muller).
  void normal_pair(double& a, double& b) {
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    a = u * f;
    b = v * f;
  }

  // Exact Poisson sample (Knuth multiplication, chunked so the loop count
  // stays bounded for larger means).
  long poisson(double mean) {
    long total = 0;
    while (mean > 16.0) {
      total += poisson_knuth(16.0);
      mean -= 16.0;
    }
    return total + poisson_knuth(mean);
  }

 private:
  long poisson_knuth(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = u01_open();
    while (prod > limit) {
      ++k;
      prod *= u01_open();
    }
    return k;
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

// Quantile coupling: inverse CDF of Poisson(mean) at u, monotone in mean.
inline long poisson_inverse_cdf(double mean, double u) {
  if (mean <= 0.0) return 0;
  double p = std::exp(-mean);
  double cdf = p;
  long k = 0;
  while (u >= cdf && k < 4096) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace evade::rng
