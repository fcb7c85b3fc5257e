#pragma once

// Event-driven Monte Carlo of a chain under Poisson queries with the
// martingale estimator. One trajectory drives all three freshness
// processes, so they are observed on shared randomness.
//
// Randomness: each replication r owns a std::mt19937_64 seeded with
// seed + r. Uniforms take the top 53 bits of one draw, so results are
// bit-identical for identical inputs on any conforming platform.

#include <cstdint>
#include <optional>

#include "ctmcfresh/ctmc.hpp"
#include "ctmcfresh/freshness.hpp"

namespace ctmcfresh::sim {

inline constexpr double kWarmupFraction = 0.05;

struct SimEstimate {
  double mean = 0.0;
  /// 1.96 * standard error across replications (0 with one replication).
  double half_width_95 = 0.0;
  double std_error = 0.0;
  double horizon = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
};

/// Time averages over [warmup, horizon] of one trajectory.
struct Replication {
  double fwe = 0.0;
  double fwc = 0.0;
  double fws = 0.0;
  Vector occupancy;  // fraction of observed time in each state
  long ordering_violations = 0;  // epochs where F_s <= F_e <= F_c failed
  long events = 0;
};

struct SimSummary {
  SimEstimate fwe;
  SimEstimate fwc;  // equals fwe when no proximity matrix was given
  SimEstimate fws;
  Vector occupancy;  // averaged over replications
  long ordering_violations = 0;
};

/// A single trajectory started from the stationary law and driven by the
/// generator seeded with `stream_seed`.
Replication simulate_replication(const Generator& g, const StationaryDist& pi, double lambda,
                                 const std::optional<ProximityMatrix>& p, double horizon,
                                 std::uint64_t stream_seed);

SimSummary simulate_all(const Generator& g, double lambda,
                        const std::optional<ProximityMatrix>& p, double horizon,
                        int replications, std::uint64_t seed);

/// Throws MissingProximity when model is FWC without `p`, NonPositiveParam
/// for nonpositive lambda/horizon or replications < 1.
SimEstimate simulate_freshness(const Generator& g, double lambda, Model model,
                               const std::optional<ProximityMatrix>& p, double horizon,
                               int replications, std::uint64_t seed);

}  // namespace ctmcfresh::sim
