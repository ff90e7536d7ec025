#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace evade {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

// Streaming mean/variance (Welford).
struct OnlineStats {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se_mean() const;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
  int points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// P(Poisson(mean) >= m), exact partial sum.
double poisson_tail(double mean, long m);

// Chernoff bound exp(-t) (e t / m)^m for m > t, else 1. Used for window sizing.
double poisson_tail_chernoff(double t, double m);

// Standard normal upper tail.
double normal_upper_tail(double z);

// Pearson correlation of two equal-length samples.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace evade
