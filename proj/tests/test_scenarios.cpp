#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ctmcfresh/scenarios.hpp"
#include "test_util.hpp"

namespace ctmcfresh {
namespace {

using testing::error_of;

std::vector<SourceSpec> intensity_pair() {
  // Intensities 1 and 3 with pi = (0.5, 0.5): alpha = beta = r.
  std::vector<SourceSpec> s{make_source("a", testing::two_state(1, 1), 1.0, Model::FWE),
                            make_source("b", testing::two_state(3, 3), 1.0, Model::FWE)};
  normalize_weights(s);
  return s;
}

TEST(Baselines, ProportionalAndInverse) {
  const auto s = intensity_pair();
  ASSERT_NEAR(s[0].intensity, 1.0, 1e-14);
  ASSERT_NEAR(s[1].intensity, 3.0, 1e-14);
  const auto prop = scen::baseline_allocation(scen::Policy::PROP, s, 4.0);
  EXPECT_NEAR(prop[0], 1.0, 1e-14);
  EXPECT_NEAR(prop[1], 3.0, 1e-14);
  const auto inv = scen::baseline_allocation(scen::Policy::INVPROP, s, 4.0);
  EXPECT_NEAR(inv[0], 3.0, 1e-14);
  EXPECT_NEAR(inv[1], 1.0, 1e-14);
  const auto uni = scen::baseline_allocation(scen::Policy::UNIFORM, s, 4.0);
  EXPECT_EQ(uni[0], 2.0);
}

TEST(Baselines, HomogeneousSourcesCoincide) {
  const auto s = scen::two_state_linear_scenario(5, 0.3, 2.0, 2.0);
  const auto uni = scen::baseline_allocation(scen::Policy::UNIFORM, s, 7.0);
  for (auto p : {scen::Policy::PROP, scen::Policy::INVPROP}) {
    const auto r = scen::baseline_allocation(p, s, 7.0);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], uni[i], 1e-12);
  }
}

TEST(Baselines, RejectsWfAndBadBudget) {
  const auto s = intensity_pair();
  EXPECT_EQ(error_of([&] { scen::baseline_allocation(scen::Policy::WF, s, 1.0); }),
            Errc::BadParameters);
  EXPECT_EQ(error_of([&] { scen::baseline_allocation(scen::Policy::UNIFORM, s, 0.0); }),
            Errc::InfeasibleBudget);
}

TEST(SystemFreshness, Limits) {
  const auto s = scen::two_state_linear_scenario(4, 0.3, 1.0, 2.0, {}, Model::FWS);
  EXPECT_EQ(system_freshness(s, std::vector<double>(4, 0.0)), 0.0);
  EXPECT_NEAR(system_freshness(s, std::vector<double>(4, 1e12)), 1.0, 1e-9);
  const std::vector<SourceSpec> one{make_source("a", testing::two_state(1, 1), 1.0, Model::FWE)};
  EXPECT_NEAR(system_freshness(one, std::vector<double>{2.0}), 0.75, 1e-15);
}

TEST(TwoStateScenario, SpacingAndSourceProperties) {
  EXPECT_NEAR(scen::linear_spacing(50, 0.01, 10.0), 0.4078, 5e-5);
  const auto s = scen::two_state_linear_scenario(50, 0.3, 0.01, 10.0);
  const double delta = scen::linear_spacing(50, 0.01, 10.0);
  double total_w = 0.0, total_r = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    EXPECT_NEAR(s[n].pi[0], 0.3, 1e-14);
    EXPECT_NEAR(s[n].pi[1], 0.7, 1e-14);
    EXPECT_NEAR(transition_intensity(s[n].g, stationary_distribution(s[n].g)),
                0.01 + static_cast<double>(n) * delta, 1e-12);
    total_w += s[n].weight;
    total_r += s[n].intensity;
  }
  EXPECT_NEAR(total_w, 1.0, 1e-12);
  EXPECT_NEAR(total_r / 50.0, 10.0, 1e-10);
}

TEST(TwoStateScenario, BadParameters) {
  EXPECT_EQ(error_of([] { scen::two_state_linear_scenario(5, 1.2, 0.1, 1.0); }),
            Errc::BadParameters);
  EXPECT_EQ(error_of([] { scen::two_state_linear_scenario(5, 0.3, 3.0, 1.0); }),
            Errc::BadParameters);
}

TEST(MmccScenario, SingleServerIsTwoState) {
  const auto m = scen::mmcc_scenario(1, 1, 2.0, 0.7, 0.7, 0);
  const auto& g = m.sources[0].g;
  ASSERT_EQ(g.size(), 2);
  EXPECT_NEAR(g.rate(0, 1), 0.7 * 2.0, 1e-15);  // xi = rho c gamma
  EXPECT_NEAR(g.rate(1, 0), 2.0, 1e-15);
}

TEST(MmccScenario, StationaryLawIsTruncatedPoisson) {
  const int c = 10;
  const auto m = scen::mmcc_scenario(4, c, 1.0, 0.3, 0.9, 1);
  for (std::size_t n = 0; n < m.sources.size(); ++n) {
    const double offered = m.loads[n] * c;  // xi / gamma
    std::vector<double> w(c + 1);
    double term = 1.0, total = 0.0;
    for (int i = 0; i <= c; ++i) {
      if (i > 0) term *= offered / i;
      w[i] = term;
      total += term;
    }
    for (int i = 0; i <= c; ++i) EXPECT_NEAR(m.sources[n].pi[i], w[i] / total, 1e-12);
    EXPECT_TRUE(m.sources[n].rf.concavity_verified);
  }
  double mean = 0.0;
  for (double rho : m.loads) mean += rho / 4.0;
  EXPECT_NEAR(mean, 0.9, 1e-14);
}

TEST(MmccScenario, EqualLoadsGiveIdenticalSources) {
  const auto m = scen::mmcc_scenario(3, 4, 1.0, 0.9, 0.9, 2);
  EXPECT_EQ(m.sources[0].g.rates(), m.sources[2].g.rates());
  EXPECT_EQ(error_of([] { scen::mmcc_scenario(3, 4, 1.0, 1.0, 0.9, 0); }), Errc::BadParameters);
}

TEST(Experiments, SweepPropertiesOnReducedGrid) {
  scen::TwoStateSweep spec;
  spec.kappas = {0.1, 1.0, 10.0};
  const auto data = scen::run_two_state_sweep(spec);
  EXPECT_EQ(data.freshness.size(), 2U * 3U * 4U);
  EXPECT_EQ(data.allocations.size(), 2U * 4U * 50U);
  EXPECT_TRUE(scen::check_sweep_dominance(data.freshness).pass);
  const auto alloc = scen::check_allocation_structure(data.allocations);
  EXPECT_TRUE(alloc.pass) << alloc.detail;
}

TEST(Experiments, MmccPropertiesOnReducedGrid) {
  scen::MmccSweep spec;
  spec.num_sources = {2, 10, 30};
  const auto rows = scen::run_mmcc_sweep(spec);
  const auto check = scen::check_mmcc_structure(rows);
  EXPECT_TRUE(check.pass) << check.detail;
}

TEST(Experiments, WritesSchemaHeaders) {
  const std::filesystem::path dir = std::filesystem::path(CTMCFRESH_TEST_TMP) / "exp";
  scen::ThreeStateValidation v;
  v.lambdas = {0.5, 2.0};
  v.horizon = 500;
  v.replications = 3;
  const auto report = scen::run_experiment(v, dir);
  ASSERT_EQ(report.files.size(), 1U);
  std::ifstream in(report.files[0]);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "model,lambda,analytic,oracle,sim_mean,sim_ci");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 6);

  scen::MmccSweep m;
  m.num_sources = {2, 4};
  m.bands = {0, 1};
  const auto r6 = scen::run_experiment(m, dir);
  std::ifstream in6(r6.files[0]);
  std::getline(in6, header);
  EXPECT_EQ(header, "rho1,v,num_sources,policy,system_freshness");
}

TEST(Experiments, TwelveSignificantDigits) {
  EXPECT_EQ(scen::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(scen::format_number(0.75), "0.75");
}

}  // namespace
}  // namespace ctmcfresh
