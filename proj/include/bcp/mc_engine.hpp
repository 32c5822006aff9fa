#pragma once
// Monte Carlo evaluation of the conditional survival functional.
//
// Each replication draws a jump scenario, samples Brownian values at the
// points where the (jump-adjusted) boundary changes, and returns the product
// of closed-form bridge survival factors. The mean over replications is the
// non-crossing probability; 1 - estimate is the crossing probability.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bcp/bm_formulas.hpp"
#include "bcp/boundary.hpp"
#include "bcp/jump_model.hpp"
#include "bcp/rng.hpp"

namespace bcp {

/// How Brownian values at partition points are drawn.
enum class PathSampling {
  Increments,  // forward Gaussian increments, in time order
  Bridge,      // B(t), then jump times, then breakpoints coarse-to-fine
};

/// What happens on the last partition segment [t_{m-1}, t].
enum class FinalSegment {
  Sampled,     // sample B(t) and use the bridge factor with an endpoint gate
  ClosedForm,  // integrate the endpoint out with linear_noncross_prob
};

struct KernelOptions {
  PathSampling path = PathSampling::Increments;
  FinalSegment final_segment = FinalSegment::Sampled;
};

struct ExperimentConfig {
  Boundary boundary = ConstantBoundary{1.0};
  JumpCountProcess jumps = PoissonProcess{0.0};
  JumpSizeLaw law = DoubleExponentialLaw{};
  double horizon = 1.0;
  std::size_t replications = 200000;
  std::uint64_t seed = 42;
  SeriesTolerance series{};
  KernelOptions kernel{};
  std::size_t workers = 1;
  /// When set, scenarios with more jumps than this contribute 0 and the
  /// estimate carries a certified Poisson tail residual.
  std::optional<std::size_t> max_jumps;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
  /// Upper bound on the probability mass dropped by max_jumps.
  std::optional<double> truncation_residual;
};

/// Scratch buffers reused across replications by one worker.
struct KernelWorkspace {
  MergedPartition partition;
  std::vector<double> path;
  std::vector<char> assigned;
  std::vector<int> partition_of_node;
  // Coarse-to-fine breakpoint order, cached per boundary.
  const PiecewiseLinearBoundary* order_for = nullptr;
  std::vector<std::size_t> node_order;
};

/// Merged-partition kernel (one-sided piecewise-linear boundary).
double survival_given_jumps_one_sided(const PiecewiseLinearBoundary& b, const JumpRealization& jumps,
                                      double t, RandomStream& rng, const KernelOptions& opts,
                                      KernelWorkspace& ws);
double survival_given_jumps_one_sided(const Boundary& b, const JumpRealization& jumps, double t,
                                      RandomStream& rng, const KernelOptions& opts = {});

/// Segment-recursion kernel for a straight line a*s + b: one Gaussian
/// increment per jump, closed-form survival after the last jump.
double survival_given_jumps_linear(double a, double b, const JumpRealization& jumps, double t,
                                   RandomStream& rng);

/// Two-sided kernel driven by explicit standard normals, one per jump.
double two_sided_weight(const TwoSidedParams& p, const JumpRealization& jumps,
                        std::span<const double> normals, const SeriesTolerance& tol = {});

double survival_given_jumps_two_sided(const TwoSidedParams& p, const JumpRealization& jumps,
                                      RandomStream& rng, const SeriesTolerance& tol = {});

/// Throws std::domain_error describing the first invalid field.
void validate(const ExperimentConfig& config);

/// Per-replication weights in replication order. Replication r always uses
/// RandomStream(seed, r).
std::vector<double> bcp_weights(const ExperimentConfig& config);

McEstimate bcp(const ExperimentConfig& config);

/// Runs bcp for each discretization count with common random numbers and
/// bridge-ordered path sampling. Requires a GeneralBoundary.
std::vector<std::pair<int, McEstimate>> bcp_nonlinear_convergence(const ExperimentConfig& config,
                                                                  std::span<const int> n_values);

/// Mean and standard error (sample sd / sqrt(N)) of a weight sample.
std::pair<double, double> mean_and_std_error(std::span<const double> weights);

}  // namespace bcp
