#include "ctmcfresh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh::opt {
namespace {

constexpr double kOuterTolerance = 1e-9;  // relative budget residual
constexpr int kMaxBisection = 2000;
constexpr int kMaxBracketSteps = 4000;

void require_concave(const SourceSpec& s) {
  if (!s.rf.concavity_verified) {
    throw Error(Errc::NotConcave, "source '" + s.id + "' has a freshness curve that failed the " +
                                      "concavity check");
  }
}

double marginal_at_zero(const SourceSpec& s) { return s.weight * eval_derivative(s.rf, 0.0); }

double active_sum(std::span<const SourceSpec> sources, const std::vector<bool>& active, double mu,
                  std::vector<double>& lambdas) {
  double sum = 0.0;
  for (std::size_t n = 0; n < sources.size(); ++n) {
    lambdas[n] = active[n] ? solve_inner(sources[n].rf, sources[n].weight, mu) : 0.0;
    sum += lambdas[n];
  }
  return sum;
}

// Outer bisection on the water level: sum_active lambda_n(mu) is strictly
// decreasing in mu, so bracket a sign change of sum - budget and halve it
// (geometrically) until the bracket collapses.
LevelSolution solve_level_bisection(std::span<const SourceSpec> sources,
                                    const std::vector<bool>& active, double budget) {
  std::vector<double> lambdas(sources.size(), 0.0);
  double mu_hi = 0.0;
  for (std::size_t n = 0; n < sources.size(); ++n) {
    if (active[n]) mu_hi = std::max(mu_hi, marginal_at_zero(sources[n]));
  }
  mu_hi += 1.0;

  double mu_lo = std::min(1.0, 0.5 * mu_hi);
  int steps = 0;
  while (active_sum(sources, active, mu_lo, lambdas) <= budget) {
    mu_lo *= 0.5;
    if (++steps > kMaxBracketSteps || mu_lo == 0.0) {
      throw Error(Errc::InfeasibleBudget, "could not bracket the water level");
    }
  }

  double mu = std::sqrt(mu_lo * mu_hi);
  for (int it = 0; it < kMaxBisection; ++it) {
    mu = std::sqrt(mu_lo * mu_hi);
    if (!(mu > mu_lo && mu < mu_hi)) break;
    const double sum = active_sum(sources, active, mu, lambdas);
    if (sum == budget) break;
    if (sum > budget) {
      mu_lo = mu;
    } else {
      mu_hi = mu;
    }
  }
  const double sum = active_sum(sources, active, mu, lambdas);
  if (std::abs(sum - budget) > kOuterTolerance * budget) {
    throw Error(Errc::InfeasibleBudget, "water level did not converge (residual " +
                                            std::to_string(sum - budget) + ")");
  }
  return LevelSolution{mu, std::move(lambdas)};
}

}  // namespace

double solve_inner(const RationalFreshness& rf, double weight, double mu) {
  if (!rf.concavity_verified) {
    throw Error(Errc::NotConcave, "freshness curve failed the concavity check");
  }
  if (!(mu > 0.0)) throw Error(Errc::BadParameters, "water level must be positive");
  if (rf.terms.empty()) {
    throw Error(Errc::BadParameters, "constant freshness curve has no marginal value");
  }
  const double pole = rf.min_decay();
  double lo = -pole + std::max(pole, 1.0) * 1e-12;
  const auto excess = [&](double lambda) { return weight * eval_derivative(rf, lambda) - mu; };
  if (excess(lo) <= 0.0) return lo;

  double hi = 1.0;
  int steps = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++steps > kMaxBracketSteps || !std::isfinite(hi)) {
      throw Error(Errc::BadParameters, "water level too small to bracket");
    }
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(excess(lo)) <= std::abs(excess(hi)) ? lo : hi;
}

LevelSolution two_state_single_shot(std::span<const SourceSpec> sources,
                                    const std::vector<bool>& active, double budget) {
  if (active.size() != sources.size()) {
    throw Error(Errc::DimensionMismatch, "one activity flag per source required");
  }
  double root_sum = 0.0;
  double pole_sum = 0.0;
  for (std::size_t n = 0; n < sources.size(); ++n) {
    const auto& s = sources[n];
    if (s.model != Model::FWE || s.rf.terms.size() != 1) {
      throw Error(Errc::NotTwoState, "source '" + s.id + "' is not a single-term FWE source");
    }
    if (!active[n]) continue;
    root_sum += std::sqrt(s.weight * s.rf.terms[0].a);
    pole_sum += s.rf.terms[0].d;
  }
  if (root_sum == 0.0) throw Error(Errc::BadParameters, "no active sources");
  const double ratio = root_sum / (budget + pole_sum);
  LevelSolution out{ratio * ratio, std::vector<double>(sources.size(), 0.0)};
  for (std::size_t n = 0; n < sources.size(); ++n) {
    if (!active[n]) continue;
    const auto& t = sources[n].rf.terms[0];
    out.lambdas[n] = std::sqrt(sources[n].weight * t.a / out.mu) - t.d;
  }
  return out;
}

AllocationResult water_fill(std::span<const SourceSpec> sources, double budget, InnerStep inner) {
  if (!(budget > 0.0)) throw Error(Errc::InfeasibleBudget, "budget must be positive");
  if (sources.empty()) throw Error(Errc::InfeasibleBudget, "no sources to allocate to");
  for (const auto& s : sources) require_concave(s);

  AllocationResult result;
  result.active.assign(sources.size(), true);
  // Constant curves (no rational terms) gain nothing from sampling.
  std::size_t flat = 0;
  for (std::size_t n = 0; n < sources.size(); ++n) {
    if (sources[n].rf.terms.empty()) {
      result.active[n] = false;
      ++flat;
    }
  }
  if (flat == sources.size()) {
    result.active.assign(sources.size(), true);
    result.lambdas.assign(sources.size(), budget / static_cast<double>(sources.size()));
    result.system_freshness = system_freshness(sources, result.lambdas);
    return result;
  }
  for (;;) {
    LevelSolution level = inner == InnerStep::SingleShot
                              ? two_state_single_shot(sources, result.active, budget)
                              : solve_level_bisection(sources, result.active, budget);
    bool all_positive = true;
    for (std::size_t n = 0; n < sources.size(); ++n) {
      if (result.active[n] && level.lambdas[n] <= 0.0) all_positive = false;
    }
    if (all_positive) {
      result.lambdas = std::move(level.lambdas);
      result.mu = level.mu;
      break;
    }
    for (std::size_t n = 0; n < sources.size(); ++n) {
      if (result.active[n] && level.lambdas[n] <= 0.0) result.active[n] = false;
    }
    ++result.iterations;
  }
  result.system_freshness = system_freshness(sources, result.lambdas);
  return result;
}

KktReport kkt_check(std::span<const SourceSpec> sources, const AllocationResult& result,
                    double budget, double tol) {
  KktReport report;
  double total = 0.0;
  for (std::size_t n = 0; n < sources.size(); ++n) {
    const auto& s = sources[n];
    total += result.lambdas[n];
    if (result.active[n]) {
      const double gap = std::abs(s.weight * eval_derivative(s.rf, result.lambdas[n]) - result.mu);
      report.worst_stationarity = std::max(report.worst_stationarity, gap);
      if (gap > tol) {
        report.violations.push_back("stationarity at source '" + s.id + "': |w f'(lambda) - mu| = " +
                                    std::to_string(gap));
      }
    } else {
      const double excess = marginal_at_zero(s) - result.mu;
      report.worst_inactive = std::max(report.worst_inactive, excess);
      if (excess > tol) {
        report.violations.push_back("inactive source '" + s.id + "' has w f'(0) above mu by " +
                                    std::to_string(excess));
      }
      if (result.lambdas[n] != 0.0) {
        report.violations.push_back("inactive source '" + s.id + "' has a nonzero rate");
      }
    }
  }
  report.budget_residual = std::abs(total - budget);
  if (report.budget_residual > tol * std::max(1.0, budget)) {
    report.violations.push_back("budget does not bind: residual " +
                                std::to_string(report.budget_residual));
  }
  report.pass = report.violations.empty();
  return report;
}

AllocationResult grid_oracle(std::span<const SourceSpec> sources, double budget, double step,
                             int refinements) {
  const std::size_t n = sources.size();
  if (n == 0 || n > 4) throw Error(Errc::TooManySources, "grid oracle handles 1 to 4 sources");
  if (!(budget > 0.0) || !(step > 0.0)) throw Error(Errc::BadParameters, "need budget, step > 0");

  std::vector<double> best(n, 0.0);
  best[n - 1] = budget;
  double best_value = system_freshness(sources, best);

  std::vector<double> rates(n, 0.0);
  const auto consider = [&]() {
    double used = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) used += rates[i];
    rates[n - 1] = std::max(0.0, budget - used);
    const double value = system_freshness(sources, rates);
    if (value > best_value) {
      best_value = value;
      best = rates;
    }
  };

  // Enumerate free coordinates i = 0..n-2 as lo[i] + m * h with partial sums <= budget.
  std::function<void(std::size_t, double, const std::vector<double>&, const std::vector<double>&,
                     double)>
      walk = [&](std::size_t dim, double used, const std::vector<double>& lo,
                 const std::vector<double>& hi, double h) {
        if (dim + 1 >= n) {
          consider();
          return;
        }
        const auto count = static_cast<long>(std::floor((hi[dim] - lo[dim]) / h + 1e-9));
        for (long m = 0; m <= count; ++m) {
          const double x = lo[dim] + static_cast<double>(m) * h;
          if (used + x > budget * (1.0 + 1e-12)) break;
          rates[dim] = x;
          walk(dim + 1, used + x, lo, hi, h);
        }
      };

  if (n > 1) {
    std::vector<double> lo(n - 1, 0.0), hi(n - 1, budget);
    walk(0, 0.0, lo, hi, step);
    double h = step;
    for (int level = 0; level < refinements; ++level) {
      const double fine = h / 10.0;
      const std::vector<double> center = best;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        lo[i] = std::max(0.0, center[i] - h);
        hi[i] = std::min(budget, center[i] + h);
      }
      walk(0, 0.0, lo, hi, fine);
      h = fine;
    }
  }

  AllocationResult out;
  out.lambdas = best;
  out.active.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.active[i] = best[i] > 0.0;
  out.system_freshness = best_value;
  // Report the largest weighted marginal among active sources as the level.
  for (std::size_t i = 0; i < n; ++i) {
    if (out.active[i]) {
      out.mu = std::max(out.mu, sources[i].weight * eval_derivative(sources[i].rf, best[i]));
    }
  }
  return out;
}

}  // namespace ctmcfresh::opt
