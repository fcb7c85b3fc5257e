#pragma once

// Water-filling allocation of a total sampling budget across sources:
//
//   maximize sum_n w_n f_n(lambda_n)  s.t.  sum_n lambda_n <= budget, lambda_n >= 0
//
// Every f_n is increasing and concave, so the optimum equalizes w_n f_n'(lambda_n)
// to a common water level mu over the active sources and idles the rest.

#include <span>
#include <string>
#include <vector>

#include "ctmcfresh/source.hpp"

namespace ctmcfresh::opt {

struct AllocationResult {
  std::vector<double> lambdas;
  double mu = 0.0;
  std::vector<bool> active;
  double system_freshness = 0.0;
  /// Rounds in which nonpositive sources were idled; at most N - 1.
  int iterations = 0;
};

enum class InnerStep {
  Bisection,   // per-source bisection for w f'(lambda) = mu, outer bisection on mu
  SingleShot,  // closed-form level for single-term (two-state FWE) sources
};

/// The unique lambda in (-min d, inf) with w f'(lambda) = mu. May be
/// negative. Throws NotConcave for unverified FWC curves.
double solve_inner(const RationalFreshness& rf, double weight, double mu);

/// Throws InfeasibleBudget for budget <= 0 or no sources, NotConcave when
/// an FWC source failed its concavity check.
AllocationResult water_fill(std::span<const SourceSpec> sources, double budget,
                            InnerStep inner = InnerStep::Bisection);

struct LevelSolution {
  double mu = 0.0;
  std::vector<double> lambdas;  // 0 for inactive sources
};

/// Closed-form water level for single-term sources:
///   mu = (sum sqrt(w a) / (budget + sum d))^2,  lambda_n = sqrt(w a / mu) - d
/// over the active set. Throws NotTwoState otherwise.
LevelSolution two_state_single_shot(std::span<const SourceSpec> sources,
                                    const std::vector<bool>& active, double budget);

struct KktReport {
  bool pass = true;
  double worst_stationarity = 0.0;  // max |w f'(lambda) - mu| over active sources
  double worst_inactive = 0.0;      // max (w f'(0) - mu)+ over inactive sources
  double budget_residual = 0.0;     // |sum lambda - budget|
  std::vector<std::string> violations;
};

/// Budget residual is judged at tol * max(1, budget).
KktReport kkt_check(std::span<const SourceSpec> sources, const AllocationResult& result,
                    double budget, double tol);

/// Exhaustive search over the simplex sum lambda = budget on a lattice of
/// spacing `step`, followed by `refinements` local zoom passes (each 10x
/// finer, over +-1 previous step around the incumbent). Up to 4 sources.
AllocationResult grid_oracle(std::span<const SourceSpec> sources, double budget, double step,
                             int refinements = 0);

}  // namespace ctmcfresh::opt
