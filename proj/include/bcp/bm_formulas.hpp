#pragma once
// Closed-form Brownian-motion crossing probabilities for straight lines.
//
// Conventions: B is a standard BM started at 0. An upper line is a*s + b,
// a lower line is -(c*s + d). The two-line series follow Anderson (1960),
// with two exponents corrected (see anderson_theta / anderson_chi).

#include <stdexcept>
#include <string>

namespace bcp {

struct LinearBoundaryParams {
  double slope = 0.0;
  double intercept = 1.0;
  double horizon = 1.0;
};

/// Corridor -(c*s + d) < B_s < a*s + b on [0, horizon).
struct TwoSidedParams {
  double upper_slope = 0.0;      // a
  double upper_intercept = 1.0;  // b
  double lower_slope = 0.0;      // c
  double lower_intercept = 1.0;  // d
  double horizon = 1.0;

  /// Corridor is open at both ends of [0, horizon].
  bool valid() const;
};

/// Truncation policy for the infinite reflection series.
struct SeriesTolerance {
  double epsilon = 1e-12;  // stop once every piece of a term is below this
  int max_terms = 200;
};

class SeriesNotConverged : public std::runtime_error {
public:
  SeriesNotConverged(const std::string& what, double last_term)
      : std::runtime_error(what), last_term_(last_term) {}
  double last_term() const { return last_term_; }

private:
  double last_term_;
};

/// P(max_{s<t} (B_s - a s - b) >= 0 | B_t = x). Equals 1 when b <= 0 or
/// x >= a t + b.
double bridge_upcross_prob(double a, double b, double t, double x);

/// P(B_s < a s + b for all s in [0, t)). Zero when b <= 0.
double linear_noncross_prob(double a, double b, double t);
double linear_noncross_prob(const LinearBoundaryParams& p);

/// Conditional probability, given B_t = x, that B reaches gamma1 + delta1 s
/// before it touches gamma2 + delta2 s.
///
/// The second exponent of each summand carries r(r+1) on the
/// gamma2 (gamma1 + delta1 t - x) product; with r(r-1) the series does not
/// reproduce the image-method bridge law for constant corridors.
double anderson_theta(double gamma1, double delta1, double gamma2, double delta2, double t,
                      double x, const SeriesTolerance& tol = {});

/// Unconditional probability that B reaches gamma1 + delta1 s before it
/// touches gamma2 + delta2 s, within [0, t).
///
/// Obtained by integrating anderson_theta against the N(0, t) density below
/// the upper line plus the reflected series above it. The second exponential
/// is r^2 (g1 d1 + g2 d2) - r(r-1) g1 d2 - r(r+1) g2 d1.
double anderson_chi(double gamma1, double delta1, double gamma2, double delta2, double t,
                    const SeriesTolerance& tol = {});

/// Bridge survival inside the corridor given the segment endpoint x.
double two_sided_segment_factor(const TwoSidedParams& p, double x, const SeriesTolerance& tol = {});

/// Unconditional survival inside the corridor over [0, horizon).
double two_sided_tail_prob(const TwoSidedParams& p, const SeriesTolerance& tol = {});

}  // namespace bcp
