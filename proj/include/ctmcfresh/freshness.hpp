#pragma once

// Mean freshness of a Poisson-sampled chain under the martingale estimator.
//
// Every closed form has the shape f(lambda) = cinf - sum_j a_j / (lambda + d_j)
// with cinf = 1. FWE and FWS have a_j > 0 (increasing, strictly concave);
// FWC coefficients may be negative, so its concavity is checked numerically.

#include <string_view>
#include <vector>

#include "ctmcfresh/ctmc.hpp"

namespace ctmcfresh {

enum class Model { FWE, FWC, FWS };

std::string_view to_string(Model model) noexcept;
/// Accepts "FWE", "FWC", "FWS" (case-insensitive). Throws BadParameters.
Model parse_model(std::string_view text);

/// Unit-diagonal matrix of state-pair proximities in [0, 1]. Entry (i, j)
/// scores true state i against estimate j.
class ProximityMatrix {
 public:
  static ProximityMatrix from_matrix(const Matrix& p);
  static ProximityMatrix identity(int k);

  int size() const noexcept { return static_cast<int>(p_.rows()); }
  const Matrix& values() const noexcept { return p_; }
  double operator()(int i, int j) const { return p_(i, j); }

 private:
  explicit ProximityMatrix(Matrix p) : p_(std::move(p)) {}
  Matrix p_;
};

/// p_ij = 1 when |i - j| <= v, else 0. v >= k - 1 gives all ones.
ProximityMatrix proximity_band(int k, int v);

struct RationalTerm {
  double a;
  double d;
};

struct RationalFreshness {
  Model model = Model::FWE;
  double cinf = 1.0;
  std::vector<RationalTerm> terms;
  double f0 = 0.0;
  /// f'' <= 0 on the 64-point log grid over [1e-4, 1e4]. Always true for
  /// FWE and FWS.
  bool concavity_verified = true;

  /// Smallest pole offset min_j d_j (infinity when there are no terms).
  double min_decay() const noexcept;
};

/// lambda * pi . diag[(lambda I - Q)^{-1}]. Works for any irreducible chain.
double fwe_mean_general(const Generator& g, const StationaryDist& pi, double lambda);

RationalFreshness fwe_rational(const SpectralForm& sf);
RationalFreshness fwc_rational(const SpectralForm& sf, const ProximityMatrix& p);
/// a_i = pi_i sigma_i, d_i = sigma_i. Reversibility is not required.
RationalFreshness fws_rational(const Generator& g, const StationaryDist& pi);

double eval(const RationalFreshness& rf, double lambda);
/// sum_j a_j / (lambda + d_j)^2. Throws PoleViolation for lambda <= -min d_j.
double eval_derivative(const RationalFreshness& rf, double lambda);
/// -2 sum_j a_j / (lambda + d_j)^3
double eval_second_derivative(const RationalFreshness& rf, double lambda);

}  // namespace ctmcfresh
