#include "bcp/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bcp/bm_formulas.hpp"

namespace bcp {

namespace {

struct Lines {
  const Boundary* boundary;
  bool two_sided;
  double upper(double s) const { return upper_value(*boundary, s); }
  double lower(double s) const {
    const auto& l = std::get<TwoSidedLinearBoundary>(*boundary);
    return -(l.c * s + l.d);
  }
};

// True when the path survives the cell (s0, x0) -> (s1, x1), both values
// taken after any jump at s0 and before any jump at s1.
bool survives_cell(const Lines& lines, double s0, double x0, double s1, double x1, bool correct,
                   RandomStream& rng) {
  const double dt = s1 - s0;
  const double u0 = lines.upper(s0), u1 = lines.upper(s1);
  if (x1 >= u1) return false;
  if (correct) {
    const double p = bridge_upcross_prob((u1 - u0) / dt, u0 - x0, dt, x1 - x0);
    if (p > 0.0 && rng.uniform() < p) return false;
  }
  if (lines.two_sided) {
    const double l0 = lines.lower(s0), l1 = lines.lower(s1);
    if (x1 <= l1) return false;
    if (correct) {
      const double p = bridge_upcross_prob(-(l1 - l0) / dt, x0 - l0, dt, -(x1 - x0));
      if (p > 0.0 && rng.uniform() < p) return false;
    }
  }
  return true;
}

bool inside(const Lines& lines, double s, double x) {
  if (x >= lines.upper(s)) return false;
  return !(lines.two_sided && x <= lines.lower(s));
}

bool simulate_path(const Lines& lines, const JumpRealization& jumps, double t,
                   const OracleConfig& oc, RandomStream& rng) {
  if (!inside(lines, 0.0, 0.0)) return false;
  double s = 0.0;
  double x = 0.0;  // X_s, jumps included
  std::size_t next_jump = 0;
  std::size_t k = 1;  // next grid index
  while (s < t) {
    double grid = std::min(t, static_cast<double>(k) * oc.grid_step);
    if (grid <= s) {
      ++k;
      continue;
    }
    const bool at_jump = next_jump < jumps.count() && jumps.times[next_jump] <= grid;
    const double s1 = at_jump ? jumps.times[next_jump] : grid;
    const double x1 = x + std::sqrt(s1 - s) * rng.normal();
    if (!survives_cell(lines, s, x, s1, x1, oc.bridge_correction, rng)) return false;
    x = x1;
    s = s1;
    if (at_jump) {
      // Pre-jump value was checked above; now the post-jump value.
      x += jumps.heights[next_jump];
      ++next_jump;
      if (!inside(lines, s, x)) return false;
    } else {
      ++k;
    }
  }
  return true;
}

}  // namespace

McEstimate simulate_bcp(const Boundary& boundary, const JumpCountProcess& proc,
                        const JumpSizeLaw& law, double t, const OracleConfig& oc) {
  validate(boundary, t);
  validate(proc);
  validate(law);
  if (!(oc.grid_step > 0.0)) throw std::domain_error("oracle: grid step must be positive");
  if (oc.replications < 1) throw std::domain_error("oracle: replications must be >= 1");
  if (oc.workers < 1) throw std::domain_error("oracle: workers must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  const Lines lines{&boundary, is_two_sided(boundary)};
  const std::size_t n = oc.replications;
  std::vector<char> survived(n, 0);

  constexpr std::size_t kChunk = 512;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= n) break;
        for (std::size_t r = begin; r < std::min(n, begin + kChunk); ++r) {
          RandomStream rng(oc.seed, r);
          const JumpRealization jumps = sample_jumps(proc, law, t, rng);
          survived[r] = simulate_path(lines, jumps, t, oc, rng) ? 1 : 0;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  const std::size_t workers = std::min(oc.workers, (n + kChunk - 1) / kChunk);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t alive = 0;
  for (char c : survived) alive += static_cast<std::size_t>(c);
  McEstimate out;
  out.estimate = static_cast<double>(alive) / static_cast<double>(n);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n));
  out.replications = n;
  out.seed = oc.seed;
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bcp
