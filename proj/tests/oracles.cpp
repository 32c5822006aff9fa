#include "oracles.hpp"

#include <cmath>
#include <random>

namespace bcp::testing {

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Outcome of one bridge: 0 survived, 1 upper first, 2 lower first.
int bridge_outcome(double u0, double u1, double l0, double l1, double t, double x,
                   bool lower_removed, int steps, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const double dt = t / steps;
  double s = 0.0;
  double w = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double rest = t - s;
    // Bridge step toward x at time t.
    const double mean = w + (x - w) * dt / rest;
    const double var = dt * (rest - dt) / rest;
    const double w1 = (i == steps - 1) ? x : mean + std::sqrt(std::max(var, 0.0)) * normal(gen);
    const double s1 = s + dt;
    const double du0 = u0 + u1 * s - w, du1 = u0 + u1 * s1 - w1;
    const double dl0 = w - (l0 + l1 * s), dl1 = w1 - (l0 + l1 * s1);
    if (du1 <= 0.0) return 1;
    if (!lower_removed && dl1 <= 0.0) return 2;
    const double pu = std::exp(-2.0 * du0 * du1 / dt);
    const double pl = lower_removed ? 0.0 : std::exp(-2.0 * dl0 * dl1 / dt);
    const double v = unif(gen);
    if (v < pu + pl) return v < pu ? 1 : 2;
    w = w1;
    s = s1;
  }
  return 0;
}

}  // namespace

double stay_in_band(double h, double t) {
  double sum = 0.0;
  const double st = std::sqrt(t);
  for (int k = -60; k <= 60; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * (phi((2 * k + 1) * h / st) - phi((2 * k - 1) * h / st));
  }
  return sum;
}

SimResult pinned_bridge_upper_first(double u0, double u1, double l0, double l1, double t, double x,
                                    bool lower_removed, int steps, int paths, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  int hits = 0;
  for (int i = 0; i < paths; ++i)
    hits += bridge_outcome(u0, u1, l0, l1, t, x, lower_removed, steps, gen) == 1;
  const double p = static_cast<double>(hits) / paths;
  return {p, std::sqrt(p * (1 - p) / paths)};
}

SimResult pinned_bridge_survival(double u0, double u1, double l0, double l1, double t, double x,
                                 int steps, int paths, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  int alive = 0;
  for (int i = 0; i < paths; ++i) alive += bridge_outcome(u0, u1, l0, l1, t, x, false, steps, gen) == 0;
  const double p = static_cast<double>(alive) / paths;
  return {p, std::sqrt(p * (1 - p) / paths)};
}

}  // namespace bcp::testing
