#pragma once

// Baseline sampling policies, the scenario families used in the numerical
// experiments, and runners that write the experiment CSVs.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctmcfresh/optimizer.hpp"
#include "ctmcfresh/source.hpp"

namespace ctmcfresh::scen {

enum class Policy { WF, UNIFORM, PROP, INVPROP };

std::string_view to_string(Policy policy) noexcept;

/// UNIFORM: budget / N. PROP: proportional to r_n. INVPROP: proportional to 1 / r_n.
/// WF is not a baseline (use opt::water_fill); passing it throws BadParameters.
std::vector<double> baseline_allocation(Policy policy, std::span<const SourceSpec> sources,
                                        double budget);

/// Allocation for any policy, WF included.
std::vector<double> allocate(Policy policy, std::span<const SourceSpec> sources, double budget);

/// Increment delta such that first + k * delta, k = 0..n-1, averages to `mean`.
double linear_spacing(int n, double first, double mean);

/// n two-state sources with stationary law (pi1, 1 - pi1) and intensities
/// r_k = r1 + k * delta averaging r_mean. Empty `weights` means 1/n each.
std::vector<SourceSpec> two_state_linear_scenario(int n, double pi1, double r1, double r_mean,
                                                  std::span<const double> weights = {},
                                                  Model model = Model::FWE);

struct MmccScenario {
  std::vector<SourceSpec> sources;
  std::vector<ProximityMatrix> proximity;
  std::vector<double> loads;
};

/// Occupancy chains of n M/M/c/c systems (c + 1 states) with linearly spaced
/// loads rho_k averaging rho_avg, arrival rate rho_k * c * gamma and
/// departures i * gamma from state i. FWC sources with band proximity v.
MmccScenario mmcc_scenario(int n, int c, double gamma, double rho1, double rho_avg, int v);

/// Log-spaced grid of `count` points over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

// ---------------------------------------------------------------------------
// Experiments

struct ThreeStateValidation {
  std::vector<double> lambdas = log_grid(1e-2, 1e2, 32);
  double horizon = 2e4;
  int replications = 20;
  std::uint64_t seed = 1;
};

struct TwoStateSweep {
  int num_sources = 50;
  double pi1 = 0.3;
  double r1 = 0.01;
  double r_mean = 10.0;
  std::vector<double> kappas = log_grid(0.1, 10.0, 16);
  std::vector<double> allocation_kappas = {0.25, 1.0, 4.0, 10.0};
};

struct MmccSweep {
  std::vector<int> num_sources = {2, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  int servers = 10;
  double gamma = 1.0;
  std::vector<double> rho1 = {0.01, 0.89};
  double rho_avg = 0.9;
  std::vector<int> bands = {0, 1, 2, 3};
  double budget = 20.0;
};

using ScenarioSpec = std::variant<ThreeStateValidation, TwoStateSweep, MmccSweep>;

struct ValidationRow {
  Model model;
  double lambda;
  double analytic;
  double oracle;
  double sim_mean;
  double sim_ci;
};

struct SweepRow {
  Model model;
  double kappa;
  Policy policy;
  double system_freshness;
};

struct AllocationRow {
  Model model;
  double kappa;
  int source_index;  // 1-based
  double lambda_over_kappa;
};

struct MmccRow {
  double rho1;
  int v;
  int num_sources;
  Policy policy;
  double system_freshness;
};

struct TwoStateSweepData {
  std::vector<SweepRow> freshness;
  std::vector<AllocationRow> allocations;
};

/// The reversible three-state birth-death chain used for formula validation.
Generator validation_generator();
/// Proximity 1 on the diagonal, 0.5 one step off it, 0 otherwise.
ProximityMatrix validation_proximity();

std::vector<ValidationRow> run_three_state_validation(const ThreeStateValidation& spec);
TwoStateSweepData run_two_state_sweep(const TwoStateSweep& spec);
std::vector<MmccRow> run_mmcc_sweep(const MmccSweep& spec);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

PropertyCheck check_validation_agreement(std::span<const ValidationRow> rows);
PropertyCheck check_sweep_dominance(std::span<const SweepRow> rows);
PropertyCheck check_allocation_structure(std::span<const AllocationRow> rows);
PropertyCheck check_mmcc_structure(std::span<const MmccRow> rows);

void write_validation_csv(const std::filesystem::path& file, std::span<const ValidationRow> rows);
void write_sweep_csv(const std::filesystem::path& file, std::span<const SweepRow> rows);
void write_allocation_csv(const std::filesystem::path& file, std::span<const AllocationRow> rows);
void write_mmcc_csv(const std::filesystem::path& file, std::span<const MmccRow> rows);

struct ExperimentReport {
  std::vector<std::filesystem::path> files;
  std::vector<PropertyCheck> checks;
};

/// Runs the experiment and writes fig3.csv, fig4.csv + fig5.csv, or fig6.csv
/// into `out_dir` (created if missing). Throws IoError on write failure.
ExperimentReport run_experiment(const ScenarioSpec& spec, const std::filesystem::path& out_dir);

/// "%.12g"
std::string format_number(double value);

}  // namespace ctmcfresh::scen
