#pragma once
// Standard normal distribution helpers built on erfc.

#include <cmath>
#include <numbers>

namespace bcp {

inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Phi(z), accurate in relative terms in both tails.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// log Phi(z). Uses the asymptotic Mills-ratio series once erfc underflows.
inline double norm_logcdf(double z) {
  if (z > -30.0) {
    if (z > 5.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
    return std::log(norm_cdf(z));
  }
  const double z2 = z * z;
  // 1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8
  const double inv = 1.0 / z2;
  const double series = 1.0 + inv * (-1.0 + inv * (3.0 + inv * (-15.0 + inv * 105.0)));
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

/// exp(log_factor) * Phi(z) without forming either factor when one of them
/// would overflow or underflow on its own.
inline double exp_times_cdf(double log_factor, double z) {
  if (std::abs(log_factor) <= 30.0) return std::exp(log_factor) * norm_cdf(z);
  return std::exp(log_factor + norm_logcdf(z));
}

}  // namespace bcp
