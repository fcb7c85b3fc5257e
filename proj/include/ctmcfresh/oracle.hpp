#pragma once

// Brute-force ground truth: stationary solutions of the product chains
// (estimate, state) and (fresh flag, state). Validation only; refuses
// chains with more than 60 states.

#include <optional>

#include "ctmcfresh/ctmc.hpp"
#include "ctmcfresh/freshness.hpp"

namespace ctmcfresh::oracle {

inline constexpr int kMaxStates = 60;

/// Pair (estimate i, state j) maps to i * K + j (zero-based).
inline int joint_index(int k, int estimate, int state) { return estimate * k + state; }

/// Generator of Y(t) = (estimate, state): (i,j)->(i,j') at q_jj' and
/// (i,j)->(j,j) at lambda for j != i. Returned unvalidated.
Matrix joint_chain_generator(const Generator& g, double lambda);

/// Stationary vector of the joint chain, indexed by joint_index.
Vector joint_chain_stationary(const Generator& g, double lambda);

/// FWE mean freshness sum_i y_ii, or FWC sum_{i,j} y_ij p_ji when `p` is given.
double joint_chain_solve(const Generator& g, double lambda,
                         const std::optional<ProximityMatrix>& p = std::nullopt);

/// Generator of Z(t) = (fresh flag, state). Flag 0 occupies indices 0..K-1,
/// flag 1 occupies K..2K-1.
Matrix fws_chain_generator(const Generator& g, double lambda);
Vector fws_chain_stationary(const Generator& g, double lambda);

/// 1 - sum_j z_{0j}
double fws_chain_solve(const Generator& g, double lambda);

}  // namespace ctmcfresh::oracle
