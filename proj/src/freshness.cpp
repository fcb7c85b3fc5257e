#include "ctmcfresh/freshness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh {
namespace {

constexpr double kMergeTolerance = 1e-12;
constexpr double kPruneTolerance = 1e-15;
constexpr int kConcavityGridPoints = 64;
constexpr double kConcavityGridLow = 1e-4;
constexpr double kConcavityGridHigh = 1e4;

// Sorts by pole, merges coincident poles and drops numerically-zero terms.
std::vector<RationalTerm> normalize_terms(std::vector<RationalTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const RationalTerm& x, const RationalTerm& y) { return x.d < y.d; });
  std::vector<RationalTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && std::abs(merged.back().d - t.d) < kMergeTolerance) {
      merged.back().a += t.a;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const RationalTerm& t) { return std::abs(t.a) < kPruneTolerance; });
  return merged;
}

bool concave_on_grid(const RationalFreshness& rf) {
  const double step = std::log(kConcavityGridHigh / kConcavityGridLow) / (kConcavityGridPoints - 1);
  for (int i = 0; i < kConcavityGridPoints; ++i) {
    const double lambda = kConcavityGridLow * std::exp(step * i);
    if (eval_second_derivative(rf, lambda) > 0.0) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::FWE: return "FWE";
    case Model::FWC: return "FWC";
    case Model::FWS: return "FWS";
  }
  return "?";
}

Model parse_model(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "FWE") return Model::FWE;
  if (upper == "FWC") return Model::FWC;
  if (upper == "FWS") return Model::FWS;
  throw Error(Errc::BadParameters, "unknown freshness model '" + std::string(text) + "'");
}

ProximityMatrix ProximityMatrix::from_matrix(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() < 1) {
    throw Error(Errc::BadShape, "proximity matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (!(p(i, j) >= 0.0 && p(i, j) <= 1.0)) {
        throw Error(Errc::BadProximity, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") outside [0, 1]");
      }
    }
    if (p(i, i) != 1.0) {
      throw Error(Errc::BadProximity, "diagonal entry " + std::to_string(i) + " is not 1");
    }
  }
  return ProximityMatrix(p);
}

ProximityMatrix ProximityMatrix::identity(int k) { return ProximityMatrix(Matrix::Identity(k, k)); }

ProximityMatrix proximity_band(int k, int v) {
  if (k < 1 || v < 0) throw Error(Errc::BadParameters, "proximity band needs k >= 1 and v >= 0");
  Matrix p(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) p(i, j) = std::abs(i - j) <= v ? 1.0 : 0.0;
  }
  return ProximityMatrix::from_matrix(p);
}

double RationalFreshness::min_decay() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) m = std::min(m, t.d);
  return m;
}

double fwe_mean_general(const Generator& g, const StationaryDist& pi, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(Errc::NonPositiveRate, "sampling rate must be positive");
  }
  const int k = g.size();
  const Matrix resolvent_arg = lambda * Matrix::Identity(k, k) - g.rates();
  const Eigen::PartialPivLU<Matrix> lu(resolvent_arg);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
    throw Error(Errc::SingularResolvent, "lambda I - Q is numerically singular");
  }
  const Matrix inverse = lu.inverse();
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += pi[i] * inverse(i, i);
  return lambda * acc;
}

RationalFreshness fwe_rational(const SpectralForm& sf) {
  const int k = sf.size();
  std::vector<RationalTerm> terms;
  terms.reserve(static_cast<std::size_t>(k - 1));
  for (int j = 0; j < k - 1; ++j) {
    // b_j = sum_i (pi_i t_ij)^2 = sum_i left(j, i)^2
    double b = 0.0;
    for (int i = 0; i < k; ++i) {
      const double w = sf.pi[i] * sf.right(i, j);
      b += w * w;
    }
    terms.push_back({b * sf.decay(j), sf.decay(j)});
  }
  RationalFreshness rf;
  rf.model = Model::FWE;
  rf.terms = normalize_terms(std::move(terms));
  rf.f0 = sf.pi.pi.squaredNorm();
  rf.concavity_verified = true;
  return rf;
}

RationalFreshness fwc_rational(const SpectralForm& sf, const ProximityMatrix& p) {
  const int k = sf.size();
  if (p.size() != k) {
    throw Error(Errc::DimensionMismatch, "proximity matrix is " + std::to_string(p.size()) +
                                             "x" + std::to_string(p.size()) + ", chain has " +
                                             std::to_string(k) + " states");
  }
  // (left * P)(j, i) = T~(j,:) P(:,i)
  const Matrix left_p = sf.left * p.values();
  std::vector<RationalTerm> terms;
  terms.reserve(static_cast<std::size_t>(k - 1));
  for (int j = 0; j < k - 1; ++j) {
    double b = 0.0;
    for (int i = 0; i < k; ++i) b += sf.pi[i] * sf.right(i, j) * left_p(j, i);
    terms.push_back({b * sf.decay(j), sf.decay(j)});
  }
  RationalFreshness rf;
  rf.model = Model::FWC;
  rf.terms = normalize_terms(std::move(terms));
  rf.f0 = sf.pi.pi.dot(p.values() * sf.pi.pi);
  rf.concavity_verified = concave_on_grid(rf);
  return rf;
}

RationalFreshness fws_rational(const Generator& g, const StationaryDist& pi) {
  const int k = g.size();
  std::vector<RationalTerm> terms;
  terms.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double sigma = g.exit_rates()(i);
    terms.push_back({pi[i] * sigma, sigma});
  }
  RationalFreshness rf;
  rf.model = Model::FWS;
  rf.terms = normalize_terms(std::move(terms));
  rf.f0 = 0.0;
  rf.concavity_verified = true;
  return rf;
}

double eval(const RationalFreshness& rf, double lambda) {
  double acc = rf.cinf;
  for (const auto& t : rf.terms) acc -= t.a / (lambda + t.d);
  return acc;
}

double eval_derivative(const RationalFreshness& rf, double lambda) {
  if (!(lambda > -rf.min_decay())) {
    throw Error(Errc::PoleViolation, "lambda " + std::to_string(lambda) +
                                         " at or below the pole -" +
                                         std::to_string(rf.min_decay()));
  }
  double acc = 0.0;
  for (const auto& t : rf.terms) {
    const double x = lambda + t.d;
    acc += t.a / (x * x);
  }
  return acc;
}

double eval_second_derivative(const RationalFreshness& rf, double lambda) {
  double acc = 0.0;
  for (const auto& t : rf.terms) {
    const double x = lambda + t.d;
    acc -= 2.0 * t.a / (x * x * x);
  }
  return acc;
}

}  // namespace ctmcfresh
