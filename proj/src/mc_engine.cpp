#include "bcp/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace bcp {

namespace {

// Smallest L with s/t * 2^L an integer; 99 when s is not dyadic.
int dyadic_level(double s, double t) {
  const double x = s / t;
  double scale = 1.0;
  for (int level = 0; level <= 30; ++level) {
    const double y = x * scale;
    if (std::abs(y - std::round(y)) < 1e-7) return level;
    scale *= 2.0;
  }
  return 99;
}

void prepare_node_order(const PiecewiseLinearBoundary& b, KernelWorkspace& ws) {
  if (ws.order_for == &b && ws.node_order.size() + 2 == b.nodes.size()) return;
  const double t = b.nodes.back();
  ws.node_order.clear();
  for (std::size_t i = 1; i + 1 < b.nodes.size(); ++i) ws.node_order.push_back(i);
  std::stable_sort(ws.node_order.begin(), ws.node_order.end(), [&](std::size_t i, std::size_t j) {
    return dyadic_level(b.nodes[i], t) < dyadic_level(b.nodes[j], t);
  });
  ws.order_for = &b;
}

double bridge_draw(double s, double s_l, double x_l, double s_r, double x_r, RandomStream& rng) {
  const double span = s_r - s_l;
  const double mean = x_l + (s - s_l) / span * (x_r - x_l);
  const double var = (s - s_l) * (s_r - s) / span;
  return mean + std::sqrt(var) * rng.normal();
}

// Fills ws.path with Brownian values at the partition points: the horizon
// first, then jump times left to right, then breakpoints coarse to fine.
// Shared breakpoints see identical draws across nested dyadic grids.
void sample_bridge_path(const PiecewiseLinearBoundary& b, const MergedPartition& part,
                        RandomStream& rng, KernelWorkspace& ws) {
  const std::size_t m = part.size();
  ws.path.assign(m, 0.0);
  ws.assigned.assign(m, 0);
  const double t = part.times[m - 1];
  ws.path[m - 1] = std::sqrt(t) * rng.normal();
  ws.assigned[m - 1] = 1;

  double s_l = 0.0, x_l = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (part.node[i] >= 0) continue;
    ws.path[i] = bridge_draw(part.times[i], s_l, x_l, t, ws.path[m - 1], rng);
    ws.assigned[i] = 1;
    s_l = part.times[i];
    x_l = ws.path[i];
  }

  prepare_node_order(b, ws);
  ws.partition_of_node.assign(b.nodes.size(), -1);
  for (std::size_t i = 0; i < m; ++i)
    if (part.node[i] >= 0) ws.partition_of_node[static_cast<std::size_t>(part.node[i])] = static_cast<int>(i);

  for (std::size_t node : ws.node_order) {
    const auto p = static_cast<std::size_t>(ws.partition_of_node[node]);
    double sl = 0.0, xl = 0.0;
    for (std::size_t j = p; j-- > 0;) {
      if (ws.assigned[j]) {
        sl = part.times[j];
        xl = ws.path[j];
        break;
      }
    }
    std::size_t r = p + 1;
    while (!ws.assigned[r]) ++r;
    ws.path[p] = bridge_draw(part.times[p], sl, xl, part.times[r], ws.path[r], rng);
    ws.assigned[p] = 1;
  }
}

// Drops interior nodes lying on the line through their neighbours.
PiecewiseLinearBoundary drop_collinear_nodes(const PiecewiseLinearBoundary& b) {
  PiecewiseLinearBoundary out;
  out.nodes.push_back(b.nodes.front());
  out.values.push_back(b.values.front());
  for (std::size_t i = 1; i + 1 < b.nodes.size(); ++i) {
    const double s0 = out.nodes.back(), v0 = out.values.back();
    const double s2 = b.nodes[i + 1], v2 = b.values[i + 1];
    const double on_line = v0 + (b.nodes[i] - s0) / (s2 - s0) * (v2 - v0);
    if (std::abs(b.values[i] - on_line) > 1e-12 * std::max(1.0, std::abs(b.values[i]))) {
      out.nodes.push_back(b.nodes[i]);
      out.values.push_back(b.values[i]);
    }
  }
  out.nodes.push_back(b.nodes.back());
  out.values.push_back(b.values.back());
  return out;
}

TwoSidedParams corridor_of(const TwoSidedLinearBoundary& b, double t) {
  return TwoSidedParams{b.a, b.b, b.c, b.d, t};
}

}  // namespace

double survival_given_jumps_one_sided(const PiecewiseLinearBoundary& b, const JumpRealization& jumps,
                                      [[maybe_unused]] double t, RandomStream& rng,
                                      const KernelOptions& opts, KernelWorkspace& ws) {
  if (!(b.values.front() > 0.0)) return 0.0;
  merge_partition(b, jumps, ws.partition);
  const MergedPartition& part = ws.partition;
  const std::size_t m = part.size();
  const bool bridge = opts.path == PathSampling::Bridge;
  if (bridge) sample_bridge_path(b, part, rng, ws);
  const bool closed_tail = !bridge && opts.final_segment == FinalSegment::ClosedForm;

  double weight = 1.0;
  double prev_time = 0.0;
  double prev_x = 0.0;
  double prev_level = part.start_level;
  for (std::size_t i = 0; i < m; ++i) {
    const double dt = part.times[i] - prev_time;
    if (i + 1 == m && closed_tail) {
      const double slope = (part.left[i] - prev_level) / dt;
      return weight * linear_noncross_prob(slope, prev_level - prev_x, dt);
    }
    const double x = bridge ? ws.path[i] : prev_x + std::sqrt(dt) * rng.normal();
    if (!(x < part.beta(i))) return 0.0;
    weight *= -std::expm1(-2.0 * (prev_level - prev_x) * (part.left[i] - x) / dt);
    prev_time = part.times[i];
    prev_x = x;
    prev_level = part.right[i];
  }
  return weight;
}

double survival_given_jumps_one_sided(const Boundary& b, const JumpRealization& jumps, double t,
                                      RandomStream& rng, const KernelOptions& opts) {
  KernelWorkspace ws;
  const auto pwl = to_piecewise(b, t);
  return survival_given_jumps_one_sided(pwl, jumps, t, rng, opts, ws);
}

double survival_given_jumps_linear(double a, double b, const JumpRealization& jumps, double t,
                                   RandomStream& rng) {
  if (!(b > 0.0)) return 0.0;
  double weight = 1.0;
  double level = b;  // b_i: boundary minus position at the start of segment i
  double prev = 0.0;
  for (std::size_t i = 0; i < jumps.count(); ++i) {
    const double dt = jumps.times[i] - prev;
    const double x = std::sqrt(dt) * rng.normal();
    const double h = jumps.heights[i];
    const double end = a * dt + level;
    if (!(x < std::min(end, end - h))) return 0.0;
    weight *= -std::expm1(-2.0 * level * (end - x) / dt);
    level = end - x - h;
    prev = jumps.times[i];
  }
  return weight * linear_noncross_prob(a, level, t - prev);
}

double two_sided_weight(const TwoSidedParams& p, const JumpRealization& jumps,
                        std::span<const double> normals, const SeriesTolerance& tol) {
  if (!p.valid()) return 0.0;
  const double a = p.upper_slope, c = p.lower_slope;
  double up = p.upper_intercept;
  double down = p.lower_intercept;
  double prev = 0.0;
  double weight = 1.0;
  for (std::size_t i = 0; i < jumps.count(); ++i) {
    const double dt = jumps.times[i] - prev;
    const double x = std::sqrt(dt) * normals[i];
    const double h = jumps.heights[i];
    const double up_end = a * dt + up;
    const double down_end = c * dt + down;
    if (!(x < std::min(up_end, up_end - h))) return 0.0;
    if (!(-x < std::min(down_end, down_end + h))) return 0.0;
    weight *= two_sided_segment_factor(TwoSidedParams{a, up, c, down, dt}, x, tol);
    if (weight == 0.0) return 0.0;
    const double moved = x + h;
    up = up_end - moved;
    down = down_end + moved;
    if (!(up > 0.0) || !(down > 0.0)) return 0.0;
    prev = jumps.times[i];
  }
  return weight * two_sided_tail_prob(TwoSidedParams{a, up, c, down, p.horizon - prev}, tol);
}

double survival_given_jumps_two_sided(const TwoSidedParams& p, const JumpRealization& jumps,
                                      RandomStream& rng, const SeriesTolerance& tol) {
  std::vector<double> z(jumps.count());
  for (auto& v : z) v = rng.normal();
  return two_sided_weight(p, jumps, z, tol);
}

void validate(const ExperimentConfig& config) {
  validate(config.boundary, config.horizon);
  validate(config.jumps);
  validate(config.law);
  if (config.replications < 1) throw std::domain_error("replications must be >= 1");
  if (config.workers < 1) throw std::domain_error("workers must be >= 1");
  if (!(config.series.epsilon > 0.0)) throw std::domain_error("series tolerance must be positive");
  if (config.series.max_terms < 1) throw std::domain_error("series term cap must be >= 1");
  if (config.kernel.path == PathSampling::Bridge &&
      config.kernel.final_segment == FinalSegment::ClosedForm)
    throw std::domain_error("bridge path sampling needs a sampled final segment");
}

std::vector<double> bcp_weights(const ExperimentConfig& config) {
  validate(config);
  const double t = config.horizon;
  const bool two_sided = is_two_sided(config.boundary);
  TwoSidedParams corridor{};
  PiecewiseLinearBoundary pwl;
  if (two_sided) {
    corridor = corridor_of(std::get<TwoSidedLinearBoundary>(config.boundary), t);
  } else {
    pwl = drop_collinear_nodes(to_piecewise(config.boundary, t));
  }
  const std::span<const double> avoid =
      two_sided ? std::span<const double>{} : std::span<const double>{pwl.nodes};

  const std::size_t n = config.replications;
  std::vector<double> weights(n, 0.0);

  auto replicate = [&](std::size_t r, KernelWorkspace& ws) {
    RandomStream rng(config.seed, r);
    const JumpRealization jumps = sample_jumps(config.jumps, config.law, t, rng, avoid);
    if (config.max_jumps && jumps.count() > *config.max_jumps) return 0.0;
    if (two_sided) return survival_given_jumps_two_sided(corridor, jumps, rng, config.series);
    return survival_given_jumps_one_sided(pwl, jumps, t, rng, config.kernel, ws);
  };

  constexpr std::size_t kChunk = 2048;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    KernelWorkspace ws;
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= n) break;
        const std::size_t end = std::min(n, begin + kChunk);
        for (std::size_t r = begin; r < end; ++r) weights[r] = replicate(r, ws);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };

  const std::size_t workers = std::min(config.workers, (n + kChunk - 1) / kChunk);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return weights;
}

std::pair<double, double> mean_and_std_error(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) return {0.0, 0.0};
  double sum = 0.0;
  for (double w : weights) sum += w;
  const double mean = sum / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double w : weights) ss += (w - mean) * (w - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n))};
}

McEstimate bcp(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto weights = bcp_weights(config);
  const auto [mean, se] = mean_and_std_error(weights);
  McEstimate out;
  out.estimate = std::clamp(mean, 0.0, 1.0);
  out.std_error = se;
  out.replications = config.replications;
  out.seed = config.seed;
  if (config.max_jumps) {
    if (const auto* poisson = std::get_if<PoissonProcess>(&config.jumps))
      out.truncation_residual = poisson_tail_bound(poisson->rate, config.horizon, *config.max_jumps);
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<std::pair<int, McEstimate>> bcp_nonlinear_convergence(const ExperimentConfig& config,
                                                                  std::span<const int> n_values) {
  const auto* general = std::get_if<GeneralBoundary>(&config.boundary);
  if (!general) throw std::domain_error("convergence study needs a general (function) boundary");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (!(n_values[i] > n_values[i - 1]))
      throw std::domain_error("discretization counts must be increasing");
  std::vector<std::pair<int, McEstimate>> out;
  for (int n : n_values) {
    ExperimentConfig c = config;
    c.boundary = GeneralBoundary{general->fn, n};
    c.kernel = KernelOptions{PathSampling::Bridge, FinalSegment::Sampled};
    out.emplace_back(n, bcp(c));
  }
  return out;
}

}  // namespace bcp
