#include "ctmcfresh/oracle.hpp"

#include <string>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh::oracle {
namespace {

void check_inputs(const Generator& g, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::NonPositiveRate, "sampling rate must be positive");
  if (g.size() > kMaxStates) {
    throw Error(Errc::TooLarge, "oracle limited to " + std::to_string(kMaxStates) +
                                    " states, got " + std::to_string(g.size()));
  }
}

void fill_diagonal(Matrix& q) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    q(i, i) = 0.0;
    q(i, i) = -q.row(i).sum();
  }
}

}  // namespace

Matrix joint_chain_generator(const Generator& g, double lambda) {
  check_inputs(g, lambda);
  const int k = g.size();
  Matrix q = Matrix::Zero(k * k, k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const int from = joint_index(k, i, j);
      for (int jn = 0; jn < k; ++jn) {
        if (jn != j) q(from, joint_index(k, i, jn)) += g.rate(j, jn);
      }
      if (j != i) q(from, joint_index(k, j, j)) += lambda;
    }
  }
  fill_diagonal(q);
  return q;
}

Vector joint_chain_stationary(const Generator& g, double lambda) {
  return solve_global_balance(joint_chain_generator(g, lambda));
}

double joint_chain_solve(const Generator& g, double lambda,
                         const std::optional<ProximityMatrix>& p) {
  const int k = g.size();
  if (p && p->size() != k) {
    throw Error(Errc::DimensionMismatch, "proximity matrix does not match chain size");
  }
  const Vector y = joint_chain_stationary(g, lambda);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!p) {
      acc += y(joint_index(k, i, i));
      continue;
    }
    // estimate i, true state j: proximity of state j to estimate i
    for (int j = 0; j < k; ++j) acc += y(joint_index(k, i, j)) * (*p)(j, i);
  }
  return acc;
}

Matrix fws_chain_generator(const Generator& g, double lambda) {
  check_inputs(g, lambda);
  const int k = g.size();
  Matrix q = Matrix::Zero(2 * k, 2 * k);
  for (int j = 0; j < k; ++j) {
    for (int jn = 0; jn < k; ++jn) {
      if (jn == j) continue;
      q(j, jn) += g.rate(j, jn);      // stale stays stale
      q(k + j, jn) += g.rate(j, jn);  // a transition clears freshness
    }
    q(j, k + j) += lambda;
  }
  fill_diagonal(q);
  return q;
}

Vector fws_chain_stationary(const Generator& g, double lambda) {
  return solve_global_balance(fws_chain_generator(g, lambda));
}

double fws_chain_solve(const Generator& g, double lambda) {
  const Vector z = fws_chain_stationary(g, lambda);
  return 1.0 - z.head(g.size()).sum();
}

}  // namespace ctmcfresh::oracle
