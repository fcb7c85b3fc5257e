#include "ctmcfresh/source.hpp"

#include <cmath>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh {

SourceSpec make_source(std::string id, Generator g, double weight, Model model,
                       std::optional<ProximityMatrix> proximity) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(Errc::BadWeight, "source '" + id + "' needs a positive weight");
  }
  StationaryDist pi = stationary_distribution(g);
  RationalFreshness rf;
  switch (model) {
    case Model::FWE:
      rf = fwe_rational(spectral_decomposition(g, pi));
      break;
    case Model::FWC:
      if (!proximity) {
        throw Error(Errc::MissingProximity, "FWC source '" + id + "' has no proximity matrix");
      }
      rf = fwc_rational(spectral_decomposition(g, pi), *proximity);
      break;
    case Model::FWS:
      rf = fws_rational(g, pi);
      break;
  }
  const double r = transition_intensity(g, pi);
  return SourceSpec{std::move(id), std::move(g), weight, model, std::move(proximity),
                    std::move(pi), r, std::move(rf)};
}

void normalize_weights(std::vector<SourceSpec>& sources) {
  double total = 0.0;
  for (const auto& s : sources) {
    if (!(s.weight > 0.0)) throw Error(Errc::BadWeight, "source '" + s.id + "' has weight <= 0");
    total += s.weight;
  }
  for (auto& s : sources) s.weight /= total;
}

double system_freshness(std::span<const SourceSpec> sources, std::span<const double> rates) {
  if (sources.size() != rates.size()) {
    throw Error(Errc::DimensionMismatch, "one rate per source required");
  }
  double acc = 0.0;
  for (std::size_t n = 0; n < sources.size(); ++n) {
    const auto& rf = sources[n].rf;
    acc += sources[n].weight * (rates[n] == 0.0 ? rf.f0 : eval(rf, rates[n]));
  }
  return acc;
}

}  // namespace ctmcfresh
