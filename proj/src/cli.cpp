#include "ctmcfresh/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "ctmcfresh/config.hpp"
#include "ctmcfresh/freshness.hpp"
#include "ctmcfresh/optimizer.hpp"
#include "ctmcfresh/oracle.hpp"
#include "ctmcfresh/scenarios.hpp"
#include "ctmcfresh/simulator.hpp"

namespace ctmcfresh::cli {
namespace {

using scen::format_number;

struct Options {
  std::string config_path;
  std::string source_id;
  std::string out_path;
  std::vector<double> lambda_grid;
  std::optional<double> budget;
  double lambda = 1.0;
  double horizon = 1e4;
  int replications = 20;
  std::uint64_t seed = 1;
  std::vector<std::string> models;
  std::string experiment;
  std::string out_dir = ".";
  std::optional<double> exp_horizon;
  std::optional<int> exp_reps;
  std::optional<int> servers;
  std::optional<double> exp_budget;
};

// Writes to --out when given, else to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    stream_->flush();
    if (!*stream_) throw Error(Errc::IoError, "write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

const config::SourceConfig& pick_source(const config::ProblemConfig& cfg, const std::string& id) {
  if (id.empty()) return cfg.sources.front();
  for (const auto& s : cfg.sources) {
    if (s.id == id) return s;
  }
  throw Error(Errc::BadParameters, "no source with id '" + id + "'");
}

int cmd_freshness(const Options& opt, std::ostream& out) {
  const auto cfg = config::load(opt.config_path);
  const auto& src = pick_source(cfg, opt.source_id);
  const Generator g = config::build_generator(src);
  const auto prox = config::build_proximity(src, g.size());
  const StationaryDist pi = stationary_distribution(g);

  std::vector<double> grid = opt.lambda_grid;
  if (grid.empty()) grid = cfg.lambda_grid.value_or(scen::log_grid(1e-2, 1e2, 32));
  for (double lambda : grid) {
    if (!(lambda > 0.0)) throw Error(Errc::NonPositiveRate, "lambda grid must be positive");
  }

  std::optional<RationalFreshness> rf;
  switch (src.model) {
    case Model::FWE:
      if (check_reversibility(g, pi, 1e-9)) rf = fwe_rational(spectral_decomposition(g, pi));
      break;
    case Model::FWC:
      if (!prox) throw Error(Errc::MissingProximity, "FWC source needs a proximity matrix");
      rf = fwc_rational(spectral_decomposition(g, pi), *prox);
      break;
    case Model::FWS:
      rf = fws_rational(g, pi);
      break;
  }
  const bool with_oracle = g.size() <= oracle::kMaxStates;

  Sink sink(opt.out_path, out);
  *sink << (with_oracle ? "lambda,f_analytic,f_oracle\n" : "lambda,f_analytic\n");
  for (double lambda : grid) {
    // Non-reversible FWE has no rational form; use the resolvent expression.
    const double analytic = rf ? eval(*rf, lambda) : fwe_mean_general(g, pi, lambda);
    *sink << format_number(lambda) << ',' << format_number(analytic);
    if (with_oracle) {
      double reference = 0.0;
      switch (src.model) {
        case Model::FWE: reference = oracle::joint_chain_solve(g, lambda); break;
        case Model::FWC: reference = oracle::joint_chain_solve(g, lambda, prox); break;
        case Model::FWS: reference = oracle::fws_chain_solve(g, lambda); break;
      }
      *sink << ',' << format_number(reference);
    }
    *sink << '\n';
  }
  sink.close();
  return kSuccess;
}

int cmd_optimize(const Options& opt, std::ostream& out) {
  const auto cfg = config::load(opt.config_path);
  const double budget = opt.budget ? *opt.budget : cfg.budget.value_or(0.0);
  const auto sources = config::build_sources(cfg);
  const auto result = opt::water_fill(sources, budget);

  Sink sink(opt.out_path, out);
  *sink << "id,model,weight,lambda,active\n";
  for (std::size_t n = 0; n < sources.size(); ++n) {
    *sink << sources[n].id << ',' << to_string(sources[n].model) << ','
          << format_number(sources[n].weight) << ',' << format_number(result.lambdas[n]) << ','
          << (result.active[n] ? 1 : 0) << '\n';
  }
  sink.close();

  out << "# budget " << format_number(budget) << '\n';
  out << "# mu " << format_number(result.mu) << '\n';
  out << "# system_freshness WF " << format_number(result.system_freshness) << '\n';
  out << "# deactivation_rounds " << result.iterations << '\n';
  for (auto policy : {scen::Policy::UNIFORM, scen::Policy::PROP, scen::Policy::INVPROP}) {
    const auto rates = scen::baseline_allocation(policy, sources, budget);
    out << "# system_freshness " << scen::to_string(policy) << ' '
        << format_number(system_freshness(sources, rates)) << '\n';
  }
  return kSuccess;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const auto cfg = config::load(opt.config_path);
  const auto& src = pick_source(cfg, opt.source_id);
  const Generator g = config::build_generator(src);
  const auto prox = config::build_proximity(src, g.size());

  std::vector<Model> models;
  for (const auto& name : opt.models) {
    try {
      models.push_back(parse_model(name));
    } catch (const Error& e) {
      throw Error(Errc::ConfigParse, e.what());
    }
  }
  if (models.empty()) models.push_back(src.model);

  Sink sink(opt.out_path, out);
  *sink << "model,lambda,mean,half_width_95,horizon,replications,seed\n";
  for (Model model : models) {
    const auto est = sim::simulate_freshness(g, opt.lambda, model, prox, opt.horizon,
                                             opt.replications, opt.seed);
    *sink << to_string(model) << ',' << format_number(opt.lambda) << ','
          << format_number(est.mean) << ',' << format_number(est.half_width_95) << ','
          << format_number(est.horizon) << ',' << est.replications << ',' << est.seed << '\n';
  }
  sink.close();
  return kSuccess;
}

int cmd_experiment(const Options& opt, std::ostream& out) {
  scen::ScenarioSpec spec;
  if (opt.experiment == "fig3") {
    scen::ThreeStateValidation v;
    v.seed = opt.seed;
    if (opt.exp_horizon) v.horizon = *opt.exp_horizon;
    if (opt.exp_reps) v.replications = *opt.exp_reps;
    spec = v;
  } else if (opt.experiment == "fig4" || opt.experiment == "fig5") {
    spec = scen::TwoStateSweep{};
  } else {
    scen::MmccSweep m;
    if (opt.servers) m.servers = *opt.servers;
    if (opt.exp_budget) m.budget = *opt.exp_budget;
    spec = m;
  }
  const auto report = scen::run_experiment(spec, opt.out_dir);
  for (const auto& f : report.files) out << "wrote " << f.string() << '\n';

  // fig4 and fig5 come from the same sweep; report the requested figure's property.
  bool ok = true;
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const auto& check = report.checks[i];
    if (opt.experiment == "fig4" && i != 0) continue;
    if (opt.experiment == "fig5" && i != 1) continue;
    out << opt.experiment << ' ' << (check.pass ? "PASS" : "FAIL") << ": " << check.name << " ("
        << check.detail << ")\n";
    ok = ok && check.pass;
  }
  return ok ? kSuccess : kValidation;
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::ConfigParse: return kUsage;
    case Errc::IoError: return kIo;
    default: return kValidation;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean information freshness of Poisson-sampled Markov sources and "
               "water-filling sampling-rate allocation",
               "ctmcfresh"};
  app.require_subcommand(1);
  Options opt;

  auto* fresh = app.add_subcommand("freshness", "Tabulate mean freshness over a lambda grid");
  fresh->add_option("config", opt.config_path, "JSON problem config")->required();
  fresh->add_option("--source", opt.source_id, "Source id (default: first)");
  fresh->add_option("--lambda-grid", opt.lambda_grid, "Comma-separated sampling rates")
      ->delimiter(',');
  fresh->add_option("--out", opt.out_path, "Output CSV (default: stdout)");

  auto* optimize = app.add_subcommand("optimize", "Water-filling allocation of a sampling budget");
  optimize->add_option("config", opt.config_path, "JSON problem config")->required();
  optimize->add_option("--budget", opt.budget, "Total sampling rate (overrides config)");
  optimize->add_option("--out", opt.out_path, "Output CSV (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo freshness estimate");
  simulate->add_option("config", opt.config_path, "JSON problem config")->required();
  simulate->add_option("--source", opt.source_id, "Source id (default: first)");
  simulate->add_option("--lambda", opt.lambda, "Sampling rate")->required();
  simulate->add_option("--horizon", opt.horizon, "Simulated time per replication");
  simulate->add_option("--reps", opt.replications, "Independent replications");
  simulate->add_option("--seed", opt.seed, "Base RNG seed");
  simulate->add_option("--models", opt.models, "Models to report (default: source model)")
      ->delimiter(',');
  simulate->add_option("--out", opt.out_path, "Output CSV (default: stdout)");

  auto* experiment = app.add_subcommand("experiment", "Regenerate an experiment's CSV data");
  experiment->add_option("name", opt.experiment, "fig3 | fig4 | fig5 | fig6")
      ->required()
      ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6"}));
  experiment->add_option("--out-dir", opt.out_dir, "Directory for CSV files");
  experiment->add_option("--seed", opt.seed, "Base RNG seed (fig3)");
  experiment->add_option("--horizon", opt.exp_horizon, "Simulated time per replication (fig3)");
  experiment->add_option("--reps", opt.exp_reps, "Replications per grid point (fig3)");
  experiment->add_option("--servers", opt.servers, "Servers c of each M/M/c/c source (fig6)");
  experiment->add_option("--budget", opt.exp_budget, "Total sampling rate (fig6)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kUsage;
  }

  try {
    if (fresh->parsed()) return cmd_freshness(opt, out);
    if (optimize->parsed()) return cmd_optimize(opt, out);
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (experiment->parsed()) return cmd_experiment(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ctmcfresh::cli
