#pragma once
// Jump component of X_t = B_t + sum_{i <= N_t} eta_i: counting process,
// jump-size laws and per-replication realizations.

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "bcp/rng.hpp"

namespace bcp {

/// Homogeneous Poisson arrivals with the given rate per unit time.
struct PoissonProcess {
  double rate = 0.0;
};

/// User-supplied counting process. Must return strictly increasing jump
/// times inside (0, t).
struct CustomCountProcess {
  std::function<std::vector<double>(double t, RandomStream& rng)> sample_times;
};

using JumpCountProcess = std::variant<PoissonProcess, CustomCountProcess>;

/// Two-sided exponential: with probability p an Exp(rate eta_up) upward
/// jump, otherwise an Exp(rate eta_down) downward jump.
struct DoubleExponentialLaw {
  double p = 0.5;
  double eta_up = 10.0;
  double eta_down = 1.0 / 0.15;
};

/// Positive jumps with the given mean.
struct ExponentialLaw {
  double mean = 0.15;
};

/// Jump of `up` with probability p, `down` otherwise.
struct BernoulliLaw {
  double p = 0.5;
  double up = 0.15;
  double down = -0.15;
};

/// Jointly drawn heights; may be correlated or non-identically distributed.
struct JointCustomLaw {
  std::function<std::vector<double>(std::size_t k, RandomStream& rng)> sample;
};

using JumpSizeLaw = std::variant<DoubleExponentialLaw, ExponentialLaw, BernoulliLaw, JointCustomLaw>;

struct JumpRealization {
  std::vector<double> times;    // strictly increasing, inside (0, t)
  std::vector<double> heights;  // same length as times

  std::size_t count() const { return times.size(); }
};

void validate(const JumpCountProcess& proc);
void validate(const JumpSizeLaw& law);

/// Poisson(mean) by inversion for small means, PTRS (Hormann 1993) otherwise.
std::size_t sample_poisson(double mean, RandomStream& rng);

std::size_t sample_jump_count(const PoissonProcess& proc, double t, RandomStream& rng);

/// Sorted Uniform(0, t) order statistics. Draws that tie with each other or
/// with any value in `avoid` are redrawn.
std::vector<double> sample_jump_times(std::size_t k, double t, RandomStream& rng,
                                      std::span<const double> avoid = {});

std::vector<double> sample_jump_heights(const JumpSizeLaw& law, std::size_t k, RandomStream& rng);

/// Count, then times, then heights, in that order from one stream.
JumpRealization sample_jumps(const JumpCountProcess& proc, const JumpSizeLaw& law, double t,
                             RandomStream& rng, std::span<const double> avoid = {});

/// Smallest n with (lambda t)^{n+1} / (n+1)! <= tol. Dropping every jump
/// count above n then costs at most that much probability mass.
std::size_t truncation_level(double rate, double t, double tol);

/// (lambda t)^{n+1} / (n+1)!, by the ratio recurrence.
double poisson_tail_bound(double rate, double t, std::size_t n);

}  // namespace bcp
