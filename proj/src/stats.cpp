#include "evade/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace evade {

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be >= 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes out of range");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval out;
  out.low = std::max(0.0, center - half);
  out.high = std::min(1.0, center + half);
  return out;
}

double OnlineStats::se_mean() const {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matched points");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate x range");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = n;
  for (int i = 0; i < n; ++i) {
    const double r = std::abs(fit.slope * x[i] + fit.intercept - y[i]);
    if (r > fit.max_abs_residual) fit.max_abs_residual = r;
  }
  return fit;
}

double poisson_tail(double mean, long m) {
  if (m <= 0) return 1.0;
  if (mean <= 0.0) return 0.0;
  double term = std::exp(-mean);
  double cdf = term;
  for (long k = 1; k < m; ++k) {
    term *= mean / static_cast<double>(k);
    cdf += term;
  }
  return std::max(0.0, 1.0 - cdf);
}

double poisson_tail_chernoff(double t, double m) {
  if (m <= t) return 1.0;
  return std::exp(-t + m - m * std::log(m / t));
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("correlation: need matched samples");
  OnlineStats sa, sb;
  for (double v : a) sa.add(v);
  for (double v : b) sb.add(v);
  double cov = 0;
  for (size_t i = 0; i < a.size(); ++i) cov += (a[i] - sa.mean) * (b[i] - sb.mean);
  cov /= static_cast<double>(a.size() - 1);
  const double denom = std::sqrt(sa.variance() * sb.variance());
  return denom > 0 ? cov / denom : 0.0;
}

}  // namespace evade
