#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctmcfresh/ctmc.hpp"
#include "ctmcfresh/freshness.hpp"

namespace ctmcfresh {

/// One monitored source with its freshness curve derived at load time.
struct SourceSpec {
  std::string id;
  Generator g;
  double weight = 1.0;
  Model model = Model::FWE;
  std::optional<ProximityMatrix> proximity;
  StationaryDist pi;
  double intensity = 0.0;  // r = sum_i pi_i sigma_i
  RationalFreshness rf;
};

/// Derives pi, r and the rational freshness curve. FWE and FWC need a
/// reversible chain (NotReversible otherwise); FWC needs `proximity`
/// (MissingProximity). Weight must be positive (BadWeight).
SourceSpec make_source(std::string id, Generator g, double weight, Model model,
                       std::optional<ProximityMatrix> proximity = std::nullopt);

/// Rescales weights to sum to one.
void normalize_weights(std::vector<SourceSpec>& sources);

/// F_S = sum_n w_n f_n(lambda_n), using f_n(0) = f0 for idle sources.
double system_freshness(std::span<const SourceSpec> sources, std::span<const double> rates);

}  // namespace ctmcfresh
