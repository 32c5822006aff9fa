#include "bcp/jump_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bcp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + ": p must be in [0, 1]");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::domain_error(std::string(what) + ": parameter must be positive and finite");
}

bool contains(std::span<const double> values, double x) {
  return std::find(values.begin(), values.end(), x) != values.end();
}

}  // namespace

void validate(const JumpCountProcess& proc) {
  std::visit(overloaded{[](const PoissonProcess& p) {
                          if (!(p.rate >= 0.0) || !std::isfinite(p.rate))
                            throw std::domain_error("poisson: rate must be >= 0");
                        },
                        [](const CustomCountProcess& c) {
                          if (!c.sample_times)
                            throw std::domain_error("custom count process: empty sampler");
                        }},
             proc);
}

void validate(const JumpSizeLaw& law) {
  std::visit(overloaded{[](const DoubleExponentialLaw& l) {
                          check_probability(l.p, "de");
                          check_positive(l.eta_up, "de");
                          check_positive(l.eta_down, "de");
                        },
                        [](const ExponentialLaw& l) { check_positive(l.mean, "exp"); },
                        [](const BernoulliLaw& l) {
                          check_probability(l.p, "ber");
                          if (!std::isfinite(l.up) || !std::isfinite(l.down))
                            throw std::domain_error("ber: jump levels must be finite");
                        },
                        [](const JointCustomLaw& l) {
                          if (!l.sample) throw std::domain_error("joint custom law: empty sampler");
                        }},
             law);
}

std::size_t sample_poisson(double mean, RandomStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::domain_error("poisson: bad mean");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Sequential inversion.
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::size_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // PTRS: transformed rejection with squeeze.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::size_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::size_t>(k);
  }
}

std::size_t sample_jump_count(const PoissonProcess& proc, double t, RandomStream& rng) {
  if (!(t > 0.0)) throw std::domain_error("sample_jump_count: t must be positive");
  if (!(proc.rate >= 0.0)) throw std::domain_error("sample_jump_count: rate must be >= 0");
  return sample_poisson(proc.rate * t, rng);
}

std::vector<double> sample_jump_times(std::size_t k, double t, RandomStream& rng,
                                      std::span<const double> avoid) {
  if (!(t > 0.0)) throw std::domain_error("sample_jump_times: t must be positive");
  std::vector<double> times;
  times.reserve(k);
  while (times.size() < k) {
    const double u = t * rng.uniform();
    if (u <= 0.0 || u >= t || contains(avoid, u) || contains(times, u)) continue;
    times.push_back(u);
  }
  std::sort(times.begin(), times.end());
  return times;
}

std::vector<double> sample_jump_heights(const JumpSizeLaw& law, std::size_t k, RandomStream& rng) {
  return std::visit(
      overloaded{[&](const DoubleExponentialLaw& l) {
                   std::vector<double> h(k);
                   for (auto& v : h) {
                     // Two uniforms per jump: direction, then magnitude.
                     const bool up = rng.uniform() < l.p;
                     v = up ? rng.exponential(1.0 / l.eta_up) : -rng.exponential(1.0 / l.eta_down);
                   }
                   return h;
                 },
                 [&](const ExponentialLaw& l) {
                   std::vector<double> h(k);
                   for (auto& v : h) v = rng.exponential(l.mean);
                   return h;
                 },
                 [&](const BernoulliLaw& l) {
                   std::vector<double> h(k);
                   for (auto& v : h) v = rng.uniform() < l.p ? l.up : l.down;
                   return h;
                 },
                 [&](const JointCustomLaw& l) {
                   auto h = l.sample(k, rng);
                   if (h.size() != k)
                     throw std::runtime_error("joint custom law returned the wrong number of heights");
                   for (double v : h)
                     if (!std::isfinite(v)) throw std::runtime_error("joint custom law: non-finite height");
                   return h;
                 }},
      law);
}

JumpRealization sample_jumps(const JumpCountProcess& proc, const JumpSizeLaw& law, double t,
                             RandomStream& rng, std::span<const double> avoid) {
  JumpRealization out;
  if (const auto* poisson = std::get_if<PoissonProcess>(&proc)) {
    const std::size_t k = sample_jump_count(*poisson, t, rng);
    out.times = sample_jump_times(k, t, rng, avoid);
  } else {
    const auto& custom = std::get<CustomCountProcess>(proc);
    out.times = custom.sample_times(t, rng);
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      const double u = out.times[i];
      if (!(u > 0.0 && u < t) || (i > 0 && !(u > out.times[i - 1])))
        throw std::runtime_error("custom count process: times must be increasing inside (0, t)");
    }
    // Probability-zero coincidences with breakpoints: nudge by redrawing
    // the offending time uniformly between its neighbours.
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      while (contains(avoid, out.times[i])) {
        const double lo = i == 0 ? 0.0 : out.times[i - 1];
        const double hi = i + 1 == out.times.size() ? t : out.times[i + 1];
        out.times[i] = lo + (hi - lo) * rng.uniform();
      }
    }
  }
  out.heights = sample_jump_heights(law, out.times.size(), rng);
  return out;
}

double poisson_tail_bound(double rate, double t, std::size_t n) {
  const double mean = rate * t;
  double r = mean;  // (mean)^1 / 1!
  for (std::size_t k = 1; k <= n; ++k) r *= mean / static_cast<double>(k + 1);
  return r;
}

std::size_t truncation_level(double rate, double t, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::domain_error("truncation_level: tol must be in (0, 1)");
  if (!(t > 0.0)) throw std::domain_error("truncation_level: t must be positive");
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw std::domain_error("truncation_level: rate must be >= 0");
  const double mean = rate * t;
  double r = mean;
  std::size_t n = 0;
  while (r > tol) {
    ++n;
    r *= mean / static_cast<double>(n + 1);
  }
  return n;
}

}  // namespace bcp
