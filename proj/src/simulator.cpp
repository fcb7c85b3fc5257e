#include "ctmcfresh/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh::sim {
namespace {

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Index drawn from cumulative weights whose last entry is the total.
  int categorical(const std::vector<double>& cumulative) {
    const double u = uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                     static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
  }

 private:
  std::mt19937_64 engine_;
};

SimEstimate summarize(const std::vector<double>& values, double horizon, std::uint64_t seed) {
  SimEstimate est;
  est.horizon = horizon;
  est.replications = static_cast<int>(values.size());
  est.seed = seed;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(values.size()));
    est.half_width_95 = 1.96 * est.std_error;
  }
  return est;
}

void check_params(double lambda, double horizon, int replications) {
  if (!(lambda > 0.0)) throw Error(Errc::NonPositiveParam, "lambda must be positive");
  if (!(horizon > 0.0)) throw Error(Errc::NonPositiveParam, "horizon must be positive");
  if (replications < 1) throw Error(Errc::NonPositiveParam, "replications must be >= 1");
}

}  // namespace

Replication simulate_replication(const Generator& g, const StationaryDist& pi, double lambda,
                                 const std::optional<ProximityMatrix>& p, double horizon,
                                 std::uint64_t stream_seed) {
  check_params(lambda, horizon, 1);
  const int k = g.size();
  if (p && p->size() != k) {
    throw Error(Errc::DimensionMismatch, "proximity matrix does not match chain size");
  }

  std::vector<std::vector<double>> jump_cdf(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    auto& row = jump_cdf[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      acc += (j == i) ? 0.0 : g.rate(i, j);
      row.push_back(acc);
    }
  }
  std::vector<double> pi_cdf;
  double acc = 0.0;
  for (int i = 0; i < k; ++i) pi_cdf.push_back(acc += pi[i]);

  Stream rng(stream_seed);
  const double warmup = kWarmupFraction * horizon;
  const double window = horizon - warmup;

  Replication rep;
  rep.occupancy = Vector::Zero(k);
  double int_fwe = 0.0, int_fwc = 0.0, int_fws = 0.0;

  // The estimate starts synchronized, as if queried at time zero.
  int state = rng.categorical(pi_cdf);
  int estimate = state;
  bool sampled_fresh = true;
  double t = 0.0;

  while (t < horizon) {
    const double sigma = g.exit_rates()(state);
    const double total = sigma + lambda;
    const double next = t + rng.exponential(total);

    const double fe = (estimate == state) ? 1.0 : 0.0;
    const double fc = p ? (*p)(state, estimate) : fe;
    const double fs = sampled_fresh ? 1.0 : 0.0;
    if (!(fs <= fe && fe <= fc)) ++rep.ordering_violations;

    const double lo = std::max(t, warmup);
    const double hi = std::min(next, horizon);
    if (hi > lo) {
      const double dt = hi - lo;
      int_fwe += fe * dt;
      int_fwc += fc * dt;
      int_fws += fs * dt;
      rep.occupancy(state) += dt;
    }
    t = next;
    if (t >= horizon) break;

    ++rep.events;
    if (rng.uniform() * total < lambda) {
      estimate = state;
      sampled_fresh = true;
    } else {
      state = rng.categorical(jump_cdf[static_cast<std::size_t>(state)]);
      sampled_fresh = false;
    }
  }

  rep.fwe = int_fwe / window;
  rep.fwc = int_fwc / window;
  rep.fws = int_fws / window;
  rep.occupancy /= window;
  return rep;
}

SimSummary simulate_all(const Generator& g, double lambda,
                        const std::optional<ProximityMatrix>& p, double horizon,
                        int replications, std::uint64_t seed) {
  check_params(lambda, horizon, replications);
  const StationaryDist pi = stationary_distribution(g);

  std::vector<double> fwe, fwc, fws;
  SimSummary out;
  out.occupancy = Vector::Zero(g.size());
  for (int r = 0; r < replications; ++r) {
    const Replication rep =
        simulate_replication(g, pi, lambda, p, horizon, seed + static_cast<std::uint64_t>(r));
    fwe.push_back(rep.fwe);
    fwc.push_back(rep.fwc);
    fws.push_back(rep.fws);
    out.occupancy += rep.occupancy;
    out.ordering_violations += rep.ordering_violations;
  }
  out.occupancy /= static_cast<double>(replications);
  out.fwe = summarize(fwe, horizon, seed);
  out.fwc = summarize(fwc, horizon, seed);
  out.fws = summarize(fws, horizon, seed);
  return out;
}

SimEstimate simulate_freshness(const Generator& g, double lambda, Model model,
                               const std::optional<ProximityMatrix>& p, double horizon,
                               int replications, std::uint64_t seed) {
  if (model == Model::FWC && !p) {
    throw Error(Errc::MissingProximity, "FWC simulation requires a proximity matrix");
  }
  const SimSummary all = simulate_all(g, lambda, model == Model::FWC ? p : std::nullopt, horizon,
                                      replications, seed);
  switch (model) {
    case Model::FWE: return all.fwe;
    case Model::FWC: return all.fwc;
    case Model::FWS: return all.fws;
  }
  return all.fwe;
}

}  // namespace ctmcfresh::sim
