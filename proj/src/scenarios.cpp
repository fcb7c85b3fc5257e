#include "ctmcfresh/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include "ctmcfresh/error.hpp"
#include "ctmcfresh/oracle.hpp"
#include "ctmcfresh/simulator.hpp"

namespace ctmcfresh::scen {
namespace {

constexpr double kOracleToleranceFweFwc = 1e-9;
constexpr double kOracleToleranceFws = 1e-10;
constexpr int kMinMonteCarloHits = 30;
constexpr double kUniformGapAtHighRatio = 0.01;
constexpr double kSimilarLoadGap = 0.02;
constexpr double kOrderSlack = 1e-12;

std::ofstream open_csv(const std::filesystem::path& file, std::string_view header) {
  std::ofstream out(file);
  if (!out) throw Error(Errc::IoError, "cannot open '" + file.string() + "' for writing");
  out << header << '\n';
  return out;
}

void finish_csv(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) throw Error(Errc::IoError, "write to '" + file.string() + "' failed");
}

std::vector<double> intensities(std::span<const SourceSpec> sources) {
  std::vector<double> r;
  r.reserve(sources.size());
  for (const auto& s : sources) r.push_back(s.intensity);
  return r;
}

}  // namespace

std::string_view to_string(Policy policy) noexcept {
  switch (policy) {
    case Policy::WF: return "WF";
    case Policy::UNIFORM: return "UNIFORM";
    case Policy::PROP: return "PROP";
    case Policy::INVPROP: return "INVPROP";
  }
  return "?";
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::vector<double> baseline_allocation(Policy policy, std::span<const SourceSpec> sources,
                                        double budget) {
  if (!(budget > 0.0)) throw Error(Errc::InfeasibleBudget, "budget must be positive");
  if (sources.empty()) throw Error(Errc::InfeasibleBudget, "no sources");
  const auto n = sources.size();
  std::vector<double> share(n, 1.0);
  switch (policy) {
    case Policy::UNIFORM:
      break;
    case Policy::PROP:
      share = intensities(sources);
      break;
    case Policy::INVPROP:
      share = intensities(sources);
      for (std::size_t i = 0; i < n; ++i) {
        if (!(share[i] > 0.0)) {
          throw Error(Errc::ZeroIntensity, "source '" + sources[i].id + "' has zero intensity");
        }
        share[i] = 1.0 / share[i];
      }
      break;
    case Policy::WF:
      throw Error(Errc::BadParameters, "WF is not a baseline policy");
  }
  double total = 0.0;
  for (double x : share) total += x;
  std::vector<double> rates(n);
  for (std::size_t i = 0; i < n; ++i) rates[i] = budget * share[i] / total;
  return rates;
}

std::vector<double> allocate(Policy policy, std::span<const SourceSpec> sources, double budget) {
  if (policy == Policy::WF) return opt::water_fill(sources, budget).lambdas;
  return baseline_allocation(policy, sources, budget);
}

double linear_spacing(int n, double first, double mean) {
  if (n < 1) throw Error(Errc::BadParameters, "need at least one source");
  if (n == 1) {
    if (first != mean) {
      throw Error(Errc::BadParameters, "a single source must sit at the mean");
    }
    return 0.0;
  }
  return 2.0 * (mean - first) / static_cast<double>(n - 1);
}

std::vector<SourceSpec> two_state_linear_scenario(int n, double pi1, double r1, double r_mean,
                                                  std::span<const double> weights, Model model) {
  if (!(pi1 > 0.0 && pi1 < 1.0)) throw Error(Errc::BadParameters, "pi1 must lie in (0, 1)");
  if (!(r1 > 0.0 && r1 < 2.0 * r_mean)) {
    throw Error(Errc::BadParameters, "need 0 < r1 < 2 r_mean");
  }
  if (!weights.empty() && weights.size() != static_cast<std::size_t>(n)) {
    throw Error(Errc::BadParameters, "one weight per source required");
  }
  if (model == Model::FWC) throw Error(Errc::BadParameters, "two-state sweep supports FWE/FWS");
  const double delta = linear_spacing(n, r1, r_mean);
  const double pi2 = 1.0 - pi1;
  std::vector<SourceSpec> sources;
  sources.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double r = r1 + k * delta;
    // Detailed balance gives r = 2 pi1 alpha = 2 pi2 beta.
    const double alpha = r / (2.0 * pi1);
    const double beta = r / (2.0 * pi2);
    Matrix q(2, 2);
    q << -alpha, alpha, beta, -beta;
    const double w = weights.empty() ? 1.0 / n : weights[static_cast<std::size_t>(k)];
    sources.push_back(
        make_source("s" + std::to_string(k + 1), Generator::validate(q), w, model));
  }
  normalize_weights(sources);
  return sources;
}

MmccScenario mmcc_scenario(int n, int c, double gamma, double rho1, double rho_avg, int v) {
  if (c < 1) throw Error(Errc::BadParameters, "need at least one server");
  if (!(gamma > 0.0)) throw Error(Errc::BadParameters, "service rate must be positive");
  if (!(rho1 > 0.0 && rho1 <= 2.0 * rho_avg - rho1)) {
    throw Error(Errc::BadParameters, "need 0 < rho1 <= rho_avg");
  }
  if (v < 0) throw Error(Errc::BadParameters, "proximity band must be >= 0");
  const double delta = linear_spacing(n, rho1, rho_avg);
  MmccScenario out;
  const ProximityMatrix band = proximity_band(c + 1, v);
  std::vector<double> death(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i) death[static_cast<std::size_t>(i)] = (i + 1) * gamma;
  for (int k = 0; k < n; ++k) {
    const double rho = rho1 + k * delta;
    const std::vector<double> birth(static_cast<std::size_t>(c), rho * c * gamma);
    out.loads.push_back(rho);
    out.proximity.push_back(band);
    out.sources.push_back(make_source("mmcc" + std::to_string(k + 1),
                                      build_birth_death(birth, death), 1.0 / n, Model::FWC, band));
  }
  normalize_weights(out.sources);
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  if (count == 1) return {lo};
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid.push_back(lo * std::exp(step * i));
  grid.back() = hi;
  return grid;
}

Generator validation_generator() {
  const std::vector<double> birth = {1.95, 1.95};
  const std::vector<double> death = {1.0, 2.0};
  return build_birth_death(birth, death);
}

ProximityMatrix validation_proximity() {
  Matrix p(3, 3);
  p << 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0;
  return ProximityMatrix::from_matrix(p);
}

std::vector<ValidationRow> run_three_state_validation(const ThreeStateValidation& spec) {
  const Generator g = validation_generator();
  const ProximityMatrix p = validation_proximity();
  const StationaryDist pi = stationary_distribution(g);
  const SpectralForm sf = spectral_decomposition(g, pi);
  const RationalFreshness fwe = fwe_rational(sf);
  const RationalFreshness fwc = fwc_rational(sf, p);
  const RationalFreshness fws = fws_rational(g, pi);

  std::vector<ValidationRow> rows;
  for (std::size_t i = 0; i < spec.lambdas.size(); ++i) {
    const double lambda = spec.lambdas[i];
    // Each grid point gets its own seed block so points are independent.
    const auto seed = spec.seed + static_cast<std::uint64_t>(i) * 1000003ULL;
    const sim::SimSummary s = sim::simulate_all(g, lambda, p, spec.horizon, spec.replications, seed);
    rows.push_back({Model::FWE, lambda, eval(fwe, lambda), oracle::joint_chain_solve(g, lambda),
                    s.fwe.mean, s.fwe.half_width_95});
    rows.push_back({Model::FWC, lambda, eval(fwc, lambda), oracle::joint_chain_solve(g, lambda, p),
                    s.fwc.mean, s.fwc.half_width_95});
    rows.push_back({Model::FWS, lambda, eval(fws, lambda), oracle::fws_chain_solve(g, lambda),
                    s.fws.mean, s.fws.half_width_95});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ValidationRow& a, const ValidationRow& b) {
    return std::tie(a.model, a.lambda) < std::tie(b.model, b.lambda);
  });
  return rows;
}

TwoStateSweepData run_two_state_sweep(const TwoStateSweep& spec) {
  TwoStateSweepData data;
  for (Model model : {Model::FWE, Model::FWS}) {
    const auto sources =
        two_state_linear_scenario(spec.num_sources, spec.pi1, spec.r1, spec.r_mean, {}, model);
    double system_intensity = 0.0;
    for (const auto& s : sources) system_intensity += s.intensity;

    for (double kappa : spec.kappas) {
      const double budget = kappa * system_intensity;
      for (Policy policy : {Policy::WF, Policy::UNIFORM, Policy::PROP, Policy::INVPROP}) {
        const auto rates = allocate(policy, sources, budget);
        data.freshness.push_back({model, kappa, policy, system_freshness(sources, rates)});
      }
    }
    for (double kappa : spec.allocation_kappas) {
      const auto wf = opt::water_fill(sources, kappa * system_intensity);
      for (std::size_t n = 0; n < sources.size(); ++n) {
        data.allocations.push_back({model, kappa, static_cast<int>(n + 1), wf.lambdas[n] / kappa});
      }
    }
  }
  return data;
}

std::vector<MmccRow> run_mmcc_sweep(const MmccSweep& spec) {
  std::vector<MmccRow> rows;
  for (double rho1 : spec.rho1) {
    for (int v : spec.bands) {
      for (int n : spec.num_sources) {
        const auto scenario = mmcc_scenario(n, spec.servers, spec.gamma, rho1, spec.rho_avg, v);
        for (Policy policy : {Policy::WF, Policy::UNIFORM}) {
          const auto rates = allocate(policy, scenario.sources, spec.budget);
          rows.push_back({rho1, v, n, policy, system_freshness(scenario.sources, rates)});
        }
      }
    }
  }
  return rows;
}

PropertyCheck check_validation_agreement(std::span<const ValidationRow> rows) {
  PropertyCheck check{"analytic = oracle; Monte Carlo agrees", true, ""};
  std::map<Model, int> hits, points;
  double worst = 0.0;
  for (const auto& row : rows) {
    const double tol = row.model == Model::FWS ? kOracleToleranceFws : kOracleToleranceFweFwc;
    const double gap = std::abs(row.analytic - row.oracle);
    worst = std::max(worst, gap);
    if (gap > tol) check.pass = false;
    ++points[row.model];
    // 95% interval first, three standard errors as the fallback.
    const double se = row.sim_ci / 1.96;
    if (std::abs(row.analytic - row.sim_mean) <= std::max(row.sim_ci, 3.0 * se)) ++hits[row.model];
  }
  for (const auto& [model, count] : points) {
    const int needed = std::min(kMinMonteCarloHits, count);
    if (hits[model] < needed) check.pass = false;
    check.detail += std::string(to_string(model)) + " MC " + std::to_string(hits[model]) + "/" +
                    std::to_string(count) + "; ";
  }
  check.detail += "max |analytic - oracle| = " + format_number(worst);
  return check;
}

PropertyCheck check_sweep_dominance(std::span<const SweepRow> rows) {
  PropertyCheck check{"WF dominates baselines; UNIFORM near WF at largest kappa", true, ""};
  std::map<std::tuple<Model, double>, std::map<Policy, double>> table;
  double largest_kappa = 0.0;
  for (const auto& r : rows) {
    table[{r.model, r.kappa}][r.policy] = r.system_freshness;
    largest_kappa = std::max(largest_kappa, r.kappa);
  }
  int violations = 0;
  for (const auto& [key, values] : table) {
    const double wf = values.at(Policy::WF);
    for (const auto& [policy, value] : values) {
      if (value > wf + kOrderSlack) ++violations;
    }
    if (std::get<1>(key) == largest_kappa) {
      const double gap = wf - values.at(Policy::UNIFORM);
      check.detail += std::string(to_string(std::get<0>(key))) + " UNIFORM gap at kappa " +
                      format_number(largest_kappa) + " = " + format_number(gap) + "; ";
      if (gap >= kUniformGapAtHighRatio) check.pass = false;
    }
  }
  if (violations > 0) check.pass = false;
  check.detail += "dominance violations = " + std::to_string(violations);
  return check;
}

PropertyCheck check_allocation_structure(std::span<const AllocationRow> rows) {
  PropertyCheck check{"idle high-intensity sources at low kappa; FWE rates increase at kappa 10",
                      true, ""};
  std::map<std::tuple<Model, double>, std::vector<std::pair<int, double>>> series;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    series[{r.model, r.kappa}].emplace_back(r.source_index, r.lambda_over_kappa);
    smallest = std::min(smallest, r.kappa);
  }
  for (auto& [key, values] : series) {
    std::sort(values.begin(), values.end());
    const auto [model, kappa] = key;
    if (kappa == smallest) {
      const int half = static_cast<int>(values.size()) / 2;
      int idle = 0;
      for (const auto& [index, rate] : values) {
        if (index > half && rate == 0.0) ++idle;
      }
      check.detail += std::string(to_string(model)) + " idle high-index sources at kappa " +
                      format_number(kappa) + " = " + std::to_string(idle) + "; ";
      if (idle == 0) check.pass = false;
    }
    if (model == Model::FWE && kappa == 10.0) {
      bool monotone = true;
      for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i].second < values[i - 1].second) monotone = false;
      }
      check.detail += std::string("FWE nondecreasing at kappa 10: ") + (monotone ? "yes" : "no") + "; ";
      if (!monotone) check.pass = false;
    }
  }
  return check;
}

PropertyCheck check_mmcc_structure(std::span<const MmccRow> rows) {
  PropertyCheck check{"WF beats UNIFORM for dissimilar loads; monotone in N and v", true, ""};
  std::map<std::tuple<double, int, int>, std::map<Policy, double>> table;
  double low_rho = std::numeric_limits<double>::infinity();
  double high_rho = -low_rho;
  for (const auto& r : rows) {
    table[{r.rho1, r.v, r.num_sources}][r.policy] = r.system_freshness;
    low_rho = std::min(low_rho, r.rho1);
    high_rho = std::max(high_rho, r.rho1);
  }
  int wf_losses = 0, n_violations = 0, v_violations = 0;
  double similar_gap = 0.0;
  for (const auto& [key, values] : table) {
    const auto [rho1, v, n] = key;
    const double gap = values.at(Policy::WF) - values.at(Policy::UNIFORM);
    if (rho1 == low_rho && !(gap > 0.0)) ++wf_losses;
    if (rho1 == high_rho) similar_gap = std::max(similar_gap, std::abs(gap));
    // Successor entries in key order share (rho1, v) with the next larger N.
    auto next = table.upper_bound(key);
    if (next != table.end() && std::get<0>(next->first) == rho1 && std::get<1>(next->first) == v) {
      for (const auto& [policy, value] : values) {
        if (next->second.at(policy) > value + kOrderSlack) ++n_violations;
      }
    }
    auto wider = table.find({rho1, v + 1, n});
    if (wider != table.end()) {
      for (const auto& [policy, value] : values) {
        if (wider->second.at(policy) < value - kOrderSlack) ++v_violations;
      }
    }
  }
  check.pass = wf_losses == 0 && n_violations == 0 && v_violations == 0 &&
               similar_gap <= kSimilarLoadGap;
  check.detail = "WF<=UNIFORM cells at rho1=" + format_number(low_rho) + ": " +
                 std::to_string(wf_losses) + "; N-monotonicity violations: " +
                 std::to_string(n_violations) + "; v-monotonicity violations: " +
                 std::to_string(v_violations) + "; max |WF-UNIFORM| at rho1=" +
                 format_number(high_rho) + ": " + format_number(similar_gap);
  return check;
}

void write_validation_csv(const std::filesystem::path& file, std::span<const ValidationRow> rows) {
  auto out = open_csv(file, "model,lambda,analytic,oracle,sim_mean,sim_ci");
  for (const auto& r : rows) {
    out << to_string(r.model) << ',' << format_number(r.lambda) << ',' << format_number(r.analytic)
        << ',' << format_number(r.oracle) << ',' << format_number(r.sim_mean) << ','
        << format_number(r.sim_ci) << '\n';
  }
  finish_csv(out, file);
}

void write_sweep_csv(const std::filesystem::path& file, std::span<const SweepRow> rows) {
  auto out = open_csv(file, "model,kappa,policy,system_freshness");
  for (const auto& r : rows) {
    out << to_string(r.model) << ',' << format_number(r.kappa) << ',' << to_string(r.policy) << ','
        << format_number(r.system_freshness) << '\n';
  }
  finish_csv(out, file);
}

void write_allocation_csv(const std::filesystem::path& file, std::span<const AllocationRow> rows) {
  auto out = open_csv(file, "model,kappa,source_index,lambda_over_kappa");
  for (const auto& r : rows) {
    out << to_string(r.model) << ',' << format_number(r.kappa) << ',' << r.source_index << ','
        << format_number(r.lambda_over_kappa) << '\n';
  }
  finish_csv(out, file);
}

void write_mmcc_csv(const std::filesystem::path& file, std::span<const MmccRow> rows) {
  auto out = open_csv(file, "rho1,v,num_sources,policy,system_freshness");
  for (const auto& r : rows) {
    out << format_number(r.rho1) << ',' << r.v << ',' << r.num_sources << ','
        << to_string(r.policy) << ',' << format_number(r.system_freshness) << '\n';
  }
  finish_csv(out, file);
}

ExperimentReport run_experiment(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());

  ExperimentReport report;
  if (const auto* v = std::get_if<ThreeStateValidation>(&spec)) {
    const auto rows = run_three_state_validation(*v);
    report.files.push_back(out_dir / "fig3.csv");
    write_validation_csv(report.files.back(), rows);
    report.checks.push_back(check_validation_agreement(rows));
  } else if (const auto* s = std::get_if<TwoStateSweep>(&spec)) {
    const auto data = run_two_state_sweep(*s);
    report.files.push_back(out_dir / "fig4.csv");
    write_sweep_csv(report.files.back(), data.freshness);
    report.files.push_back(out_dir / "fig5.csv");
    write_allocation_csv(report.files.back(), data.allocations);
    report.checks.push_back(check_sweep_dominance(data.freshness));
    report.checks.push_back(check_allocation_structure(data.allocations));
  } else if (const auto* m = std::get_if<MmccSweep>(&spec)) {
    const auto rows = run_mmcc_sweep(*m);
    report.files.push_back(out_dir / "fig6.csv");
    write_mmcc_csv(report.files.back(), rows);
    report.checks.push_back(check_mmcc_structure(rows));
  }
  return report;
}

}  // namespace ctmcfresh::scen
