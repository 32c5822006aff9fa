#include "bcp/bm_formulas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bcp/normal.hpp"

namespace bcp {

namespace {

void require_finite(std::initializer_list<double> values, const char* where) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(where) + ": non-finite argument");
  }
}

void require_positive_time(double t, const char* where) {
  if (!(t > 0.0)) throw std::domain_error(std::string(where) + ": horizon must be positive");
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Upper bound on P(sup_{s<=t} |W_s| < h) for W a 0->0 Brownian bridge of
// length t (Kolmogorov dual series, first term with geometric tail).
double bridge_strip_bound(double h, double t) {
  const double y2 = h * h / t;
  const double q = std::exp(-std::numbers::pi * std::numbers::pi / y2);
  return std::sqrt(2.0 * std::numbers::pi / y2) *
         std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * y2)) / (1.0 - q);
}

// Upper bound on P(sup_{s<=t} |B_s| < h).
double bm_strip_bound(double h, double t) {
  return 4.0 / std::numbers::pi * std::exp(-std::numbers::pi * std::numbers::pi * t / (8.0 * h * h));
}

// Upper bound on survival in the corridor, via Anderson's inequality: over
// any sub-interval of length tau on which the corridor is never wider than
// 2h, the centred part of the path must stay within a strip of half-width h.
// Tried on the whole horizon and on the window where a corridor that closes
// (or opens) linearly is tightest.
template <class StripBound>
double corridor_bound(const TwoSidedParams& p, StripBound strip) {
  const double t = p.horizon;
  const double w0 = p.upper_intercept + p.lower_intercept;
  const double w1 = w0 + (p.upper_slope + p.lower_slope) * t;
  double best = strip(0.5 * std::max(w0, w1), t);
  const double lo = std::min(w0, w1);
  if (!(lo > 0.0)) return 0.0;
  const double rate = std::abs(w1 - w0) / t;
  if (rate > 0.0) {
    const double tau = std::min(t, lo / rate);
    best = std::min(best, strip(0.5 * (lo + rate * tau), tau));
  }
  return best;
}

[[noreturn]] void throw_not_converged(const char* where, double last) {
  throw SeriesNotConverged(std::string(where) + ": series did not converge", last);
}

}  // namespace

bool TwoSidedParams::valid() const {
  if (!(horizon > 0.0) || !(upper_intercept > 0.0) || !(lower_intercept > 0.0)) return false;
  return (upper_slope + lower_slope) * horizon + upper_intercept + lower_intercept > 0.0;
}

double bridge_upcross_prob(double a, double b, double t, double x) {
  require_finite({a, b, t, x}, "bridge_upcross_prob");
  require_positive_time(t, "bridge_upcross_prob");
  const double gap = a * t + b - x;
  if (b <= 0.0 || gap <= 0.0) return 1.0;
  return clamp01(std::exp(-2.0 * b * gap / t));
}

double linear_noncross_prob(double a, double b, double t) {
  require_finite({a, b, t}, "linear_noncross_prob");
  require_positive_time(t, "linear_noncross_prob");
  if (b <= 0.0) return 0.0;
  const double st = std::sqrt(t);
  const double p = norm_cdf(a * st + b / st) - exp_times_cdf(-2.0 * a * b, a * st - b / st);
  return clamp01(p);
}

double linear_noncross_prob(const LinearBoundaryParams& p) {
  return linear_noncross_prob(p.slope, p.intercept, p.horizon);
}

double anderson_theta(double g1, double d1, double g2, double d2, double t, double x,
                      const SeriesTolerance& tol) {
  require_finite({g1, d1, g2, d2, t, x}, "anderson_theta");
  require_positive_time(t, "anderson_theta");
  const double up = g1 + d1 * t - x;  // distance to the upper line at t
  if (up <= 0.0) return 1.0;
  const double lo = g2 + d2 * t - x;

  double sum = 0.0;
  double last = 0.0;
  for (int r = 1; r <= tol.max_terms; ++r) {
    const double rr = r;
    const double e1 = rr * rr * g1 * up + (rr - 1) * (rr - 1) * g2 * lo -
                      rr * (rr - 1) * (g1 * lo + g2 * up);
    const double e2 = rr * rr * (g1 * up + g2 * lo) - rr * (rr - 1) * g1 * lo -
                      rr * (rr + 1) * g2 * up;
    const double t1 = std::exp(-2.0 * e1 / t);
    const double t2 = std::exp(-2.0 * e2 / t);
    if (!std::isfinite(t1) || !std::isfinite(t2)) throw_not_converged("anderson_theta", HUGE_VAL);
    sum += t1 - t2;
    last = std::max(t1, t2);
    if (last < tol.epsilon) return clamp01(sum);
  }
  throw_not_converged("anderson_theta", last);
}

double anderson_chi(double g1, double d1, double g2, double d2, double t,
                    const SeriesTolerance& tol) {
  require_finite({g1, d1, g2, d2, t}, "anderson_chi");
  require_positive_time(t, "anderson_chi");
  const double st = std::sqrt(t);
  double sum = norm_cdf(-(d1 * t + g1) / st);
  double last = 0.0;
  for (int r = 1; r <= tol.max_terms; ++r) {
    const double rr = r;
    const double l1 = -2.0 * (rr * g1 - (rr - 1) * g2) * (rr * d1 - (rr - 1) * d2);
    const double z1 = (d1 * t + 2 * (rr - 1) * g2 - (2 * rr - 1) * g1) / st;
    const double l2 = -2.0 * (rr * rr * (g1 * d1 + g2 * d2) - rr * (rr - 1) * g1 * d2 -
                              rr * (rr + 1) * g2 * d1);
    const double z2 = (d1 * t + 2 * rr * g2 - (2 * rr - 1) * g1) / st;
    const double l3 = -2.0 * ((rr - 1) * g1 - rr * g2) * ((rr - 1) * d1 - rr * d2);
    const double z3 = -(d1 * t - 2 * rr * g2 + (2 * rr - 1) * g1) / st;
    const double l4 = -2.0 * (rr * rr * (g1 * d1 + g2 * d2) - rr * (rr - 1) * g2 * d1 -
                              rr * (rr + 1) * g1 * d2);
    const double z4 = -(d1 * t + (2 * rr + 1) * g1 - 2 * rr * g2) / st;

    const double p1 = exp_times_cdf(l1, z1);
    const double p2 = exp_times_cdf(l2, z2);
    const double p3 = exp_times_cdf(l3, z3);
    const double p4 = exp_times_cdf(l4, z4);
    if (!std::isfinite(p1 + p2 + p3 + p4)) throw_not_converged("anderson_chi", HUGE_VAL);
    sum += (p1 - p2) - (p3 - p4);
    last = std::max({p1, p2, p3, p4});
    if (last < tol.epsilon) return clamp01(sum);
  }
  throw_not_converged("anderson_chi", last);
}

double two_sided_segment_factor(const TwoSidedParams& p, double x, const SeriesTolerance& tol) {
  require_finite({p.upper_slope, p.upper_intercept, p.lower_slope, p.lower_intercept, p.horizon, x},
                 "two_sided_segment_factor");
  require_positive_time(p.horizon, "two_sided_segment_factor");
  const double a = p.upper_slope, b = p.upper_intercept;
  const double c = p.lower_slope, d = p.lower_intercept;
  const double t = p.horizon;
  if (!p.valid()) return 0.0;
  if (x >= a * t + b || x <= -(c * t + d)) return 0.0;
  if (corridor_bound(p, bridge_strip_bound) < tol.epsilon) return 0.0;

  const double up = anderson_theta(b, a, -d, -c, t, x, tol);
  const double down = anderson_theta(d, c, -b, -a, t, -x, tol);
  return clamp01(1.0 - (up + down));
}

double two_sided_tail_prob(const TwoSidedParams& p, const SeriesTolerance& tol) {
  require_finite({p.upper_slope, p.upper_intercept, p.lower_slope, p.lower_intercept, p.horizon},
                 "two_sided_tail_prob");
  require_positive_time(p.horizon, "two_sided_tail_prob");
  const double a = p.upper_slope, b = p.upper_intercept;
  const double c = p.lower_slope, d = p.lower_intercept;
  const double t = p.horizon;
  if (!p.valid()) return 0.0;
  if (corridor_bound(p, bm_strip_bound) < tol.epsilon) return 0.0;

  const double up = anderson_chi(b, a, -d, -c, t, tol);
  const double down = anderson_chi(d, c, -b, -a, t, tol);
  return clamp01(1.0 - (up + down));
}

}  // namespace bcp
