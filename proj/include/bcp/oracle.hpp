#pragma once
// Brute-force reference estimator: simulate X on a fine grid with jumps
// inserted at their exact times, and catch between-grid crossings with a
// Brownian-bridge Bernoulli toss. Shares no survival logic with mc_engine.

#include <cstddef>
#include <cstdint>

#include "bcp/boundary.hpp"
#include "bcp/jump_model.hpp"
#include "bcp/mc_engine.hpp"

namespace bcp {

struct OracleConfig {
  double grid_step = 1e-3;
  std::size_t replications = 200000;
  std::uint64_t seed = 42;
  bool bridge_correction = true;
  std::size_t workers = 1;
};

/// Survival frequency with binomial standard error. General boundaries are
/// evaluated directly (not discretized).
McEstimate simulate_bcp(const Boundary& boundary, const JumpCountProcess& proc,
                        const JumpSizeLaw& law, double t, const OracleConfig& oc);

}  // namespace bcp
