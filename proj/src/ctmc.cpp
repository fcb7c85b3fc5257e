#include "ctmcfresh/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh {
namespace {

constexpr double kDiagonalTolerance = 1e-9;
constexpr double kReversibilityTolerance = 1e-9;

// Breadth-first reachability from state 0 over edges with q_ij > 0, optionally
// following edges backwards.
bool reaches_all(const Matrix& q, bool reverse) {
  const auto k = q.rows();
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  std::deque<Eigen::Index> frontier{0};
  seen[0] = true;
  Eigen::Index count = 1;
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop_front();
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == i || seen[static_cast<std::size_t>(j)]) continue;
      const double rate = reverse ? q(j, i) : q(i, j);
      if (rate > 0.0) {
        seen[static_cast<std::size_t>(j)] = true;
        frontier.push_back(j);
        ++count;
      }
    }
  }
  return count == k;
}

std::string entry_name(Eigen::Index i, Eigen::Index j) {
  return "q[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

}  // namespace

Generator Generator::validate(const Matrix& raw) {
  if (raw.rows() != raw.cols()) {
    throw Error(Errc::BadShape, "generator must be square, got " + std::to_string(raw.rows()) +
                                    "x" + std::to_string(raw.cols()));
  }
  if (raw.rows() < 2) {
    throw Error(Errc::BadShape, "generator needs at least 2 states");
  }
  if (!raw.allFinite()) {
    throw Error(Errc::BadShape, "generator has non-finite entries");
  }
  const auto k = raw.rows();
  Matrix q = raw;
  Vector sigma(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double exit = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == i) continue;
      if (raw(i, j) < 0.0) {
        throw Error(Errc::NegativeRate,
                    entry_name(i, j) + " = " + std::to_string(raw(i, j)) + " < 0");
      }
      exit += raw(i, j);
    }
    if (std::abs(raw(i, i) + exit) >= kDiagonalTolerance) {
      throw Error(Errc::BadShape, "row " + std::to_string(i) + " does not sum to zero (diagonal " +
                                      std::to_string(raw(i, i)) + ", exit rate " +
                                      std::to_string(exit) + ")");
    }
    q(i, i) = -exit;
    sigma(i) = exit;
  }
  if (!reaches_all(q, false) || !reaches_all(q, true)) {
    throw Error(Errc::NotIrreducible, "positive-rate graph is not strongly connected");
  }
  return Generator(std::move(q), std::move(sigma));
}

Vector solve_global_balance(const Matrix& q) {
  const auto k = q.rows();
  // Columns of Q are the balance equations; the last one is swapped for sum(pi) = 1.
  Matrix system = q.transpose();
  system.row(k - 1).setOnes();
  Vector rhs = Vector::Zero(k);
  rhs(k - 1) = 1.0;
  const Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
    throw Error(Errc::SingularSystem, "balance system is numerically singular (rcond " +
                                          std::to_string(lu.rcond()) + ")");
  }
  Vector pi = lu.solve(rhs);
  if (!pi.allFinite()) {
    throw Error(Errc::SingularSystem, "balance solve produced non-finite values");
  }
  return pi;
}

StationaryDist stationary_distribution(const Generator& g) {
  Vector pi = solve_global_balance(g.rates());
  if (pi.minCoeff() <= 0.0) {
    throw Error(Errc::SingularSystem, "stationary vector has a nonpositive entry");
  }
  pi /= pi.sum();
  return StationaryDist{std::move(pi)};
}

bool check_reversibility(const Generator& g, const StationaryDist& pi, double tol) {
  const int k = g.size();
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (std::abs(pi[i] * g.rate(i, j) - pi[j] * g.rate(j, i)) > tol) return false;
    }
  }
  return true;
}

double transition_intensity(const Generator& g, const StationaryDist& pi) {
  return pi.pi.dot(g.exit_rates());
}

SpectralForm spectral_decomposition(const Generator& g, const StationaryDist& pi) {
  if (!check_reversibility(g, pi, kReversibilityTolerance)) {
    throw Error(Errc::NotReversible, "detailed balance violated beyond 1e-9");
  }
  const int k = g.size();
  const Vector sqrt_pi = pi.pi.array().sqrt();
  const Vector inv_sqrt_pi = sqrt_pi.cwiseInverse();

  Matrix s = sqrt_pi.asDiagonal() * g.rates() * inv_sqrt_pi.asDiagonal();
  s = 0.5 * (s + s.transpose());

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) {
    throw Error(Errc::EigenFailure, "symmetric eigensolver did not converge");
  }
  const Vector& values = eig.eigenvalues();
  const Matrix& vectors = eig.eigenvectors();

  // Eigen sorts ascending, so the stationary eigenvalue (0) is the largest.
  Eigen::Index zero_index = 0;
  values.maxCoeff(&zero_index);

  std::vector<Eigen::Index> order;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (j != zero_index) order.push_back(j);
  }
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  SpectralForm out;
  out.pi = pi;
  out.decay.resize(k - 1);
  out.right.resize(k, k);
  out.left.resize(k, k);
  for (int col = 0; col < k - 1; ++col) {
    const auto src = order[static_cast<std::size_t>(col)];
    out.decay(col) = -values(src);
    if (!(out.decay(col) > 0.0)) {
      throw Error(Errc::EigenFailure, "nonzero eigenvalue " + std::to_string(values(src)) +
                                          " is not strictly negative");
    }
    out.right.col(col) = inv_sqrt_pi.cwiseProduct(vectors.col(src));
    out.left.row(col) = sqrt_pi.cwiseProduct(vectors.col(src)).transpose();
  }
  out.right.col(k - 1).setOnes();
  out.left.row(k - 1) = pi.pi.transpose();
  return out;
}

Generator build_birth_death(std::span<const double> birth, std::span<const double> death) {
  if (birth.empty() || birth.size() != death.size()) {
    throw Error(Errc::BadShape, "birth and death vectors must be nonempty and equally long");
  }
  const auto k = static_cast<Eigen::Index>(birth.size()) + 1;
  Matrix q = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < birth.size(); ++i) {
    if (!(birth[i] > 0.0) || !(death[i] > 0.0)) {
      throw Error(Errc::NonPositiveRate, "birth/death rate at index " + std::to_string(i) +
                                             " must be positive");
    }
    const auto n = static_cast<Eigen::Index>(i);
    q(n, n + 1) = birth[i];
    q(n + 1, n) = death[i];
  }
  for (Eigen::Index i = 0; i < k; ++i) q(i, i) = -(q.row(i).sum() - q(i, i));
  return Generator::validate(q);
}

}  // namespace ctmcfresh
