#pragma once

// Finite-state irreducible continuous-time Markov chains: generator
// validation, global balance, detailed balance and the spectral
// decomposition of reversible generators.

#include <span>

#include <Eigen/Dense>

namespace ctmcfresh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Validated infinitesimal generator of an irreducible chain with K >= 2
/// states. Immutable once constructed.
class Generator {
 public:
  /// Checks shape, signs, row sums and strong connectivity. A supplied
  /// diagonal within 1e-9 of -sum(off-diagonal) is replaced by the exact
  /// negative row sum.
  static Generator validate(const Matrix& raw);

  int size() const noexcept { return static_cast<int>(q_.rows()); }
  const Matrix& rates() const noexcept { return q_; }
  double rate(int i, int j) const { return q_(i, j); }
  /// sigma_i = sum_{j != i} q_ij
  const Vector& exit_rates() const noexcept { return sigma_; }

 private:
  Generator(Matrix q, Vector sigma) : q_(std::move(q)), sigma_(std::move(sigma)) {}

  Matrix q_;
  Vector sigma_;
};

inline Generator validate_generator(const Matrix& raw) { return Generator::validate(raw); }

struct StationaryDist {
  Vector pi;

  int size() const noexcept { return static_cast<int>(pi.size()); }
  double operator[](int i) const { return pi(i); }
};

/// Solves pi Q = 0, pi e = 1 for an arbitrary square rate matrix by
/// replacing the last balance equation with the normalization constraint.
/// Throws SingularSystem if the reduced system is numerically singular.
/// No structural checks are made, so product chains can reuse it.
Vector solve_global_balance(const Matrix& q);

StationaryDist stationary_distribution(const Generator& g);

/// max_{i != j} |pi_i q_ij - pi_j q_ji| <= tol
bool check_reversibility(const Generator& g, const StationaryDist& pi, double tol);

/// Long-run frequency of state transitions, r = sum_i pi_i sigma_i.
double transition_intensity(const Generator& g, const StationaryDist& pi);

/// Real spectral form of a reversible generator. Columns of `right` are
/// right eigenvectors, rows of `left` the matching left eigenvectors, with
/// left = right^{-1}. Index K-1 holds the stationary pair (ones column,
/// pi row); indices 0..K-2 carry decay rates d_j > 0 in ascending order,
/// i.e. Q = right * diag(-d, 0) * left.
struct SpectralForm {
  StationaryDist pi;
  Vector decay;
  Matrix right;
  Matrix left;

  int size() const noexcept { return pi.size(); }
};

/// Symmetrizes Q with Pi^{1/2} and diagonalizes the result. Throws
/// NotReversible if detailed balance fails at 1e-9.
SpectralForm spectral_decomposition(const Generator& g, const StationaryDist& pi);

/// Tridiagonal generator with q_{i,i+1} = birth[i] and q_{i+1,i} = death[i].
Generator build_birth_death(std::span<const double> birth, std::span<const double> death);

}  // namespace ctmcfresh
