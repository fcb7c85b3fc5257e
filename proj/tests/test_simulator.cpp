#include <gtest/gtest.h>

#include <cmath>

#include "ctmcfresh/simulator.hpp"
#include "test_util.hpp"

namespace ctmcfresh {
namespace {

using testing::error_of;

TEST(Simulator, TwoStateFweMatchesClosedForm) {
  const auto est =
      sim::simulate_freshness(testing::two_state(1, 1), 2.0, Model::FWE, std::nullopt, 1e4, 20, 42);
  EXPECT_LE(std::abs(est.mean - 0.75), 3.0 * est.std_error);
  EXPECT_GT(est.half_width_95, 0.0);
  EXPECT_EQ(est.replications, 20);
  EXPECT_EQ(est.seed, 42U);
}

TEST(Simulator, ThreeStateFwcWithinInterval) {
  const auto g = testing::validation_chain();
  const auto p = testing::half_step_proximity();
  const auto rf = fwc_rational(spectral_decomposition(g, stationary_distribution(g)), p);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const auto est = sim::simulate_freshness(g, lambda, Model::FWC, p, 5e3, 20, 9);
    EXPECT_LE(std::abs(est.mean - eval(rf, lambda)), 3.5 * est.std_error) << lambda;
  }
}

TEST(Simulator, DeterministicUnderSeed) {
  const auto g = testing::validation_chain();
  const auto a = sim::simulate_all(g, 0.8, testing::half_step_proximity(), 2e3, 4, 123);
  const auto b = sim::simulate_all(g, 0.8, testing::half_step_proximity(), 2e3, 4, 123);
  EXPECT_EQ(a.fwe.mean, b.fwe.mean);
  EXPECT_EQ(a.fwc.mean, b.fwc.mean);
  EXPECT_EQ(a.fws.mean, b.fws.mean);
  EXPECT_EQ(a.fwe.half_width_95, b.fwe.half_width_95);
  const auto c = sim::simulate_all(g, 0.8, testing::half_step_proximity(), 2e3, 4, 124);
  EXPECT_NE(a.fwe.mean, c.fwe.mean);
}

TEST(Simulator, PathwiseOrderingOnSharedTrajectory) {
  const auto g = testing::validation_chain();
  const auto s = sim::simulate_all(g, 1.3, testing::half_step_proximity(), 5e3, 5, 1);
  EXPECT_EQ(s.ordering_violations, 0);
  EXPECT_LE(s.fws.mean, s.fwe.mean);
  EXPECT_LE(s.fwe.mean, s.fwc.mean);
}

TEST(Simulator, OccupancyConvergesToStationaryLaw) {
  const auto g = testing::validation_chain();
  const auto pi = stationary_distribution(g);
  const int reps = 20;
  const auto s = sim::simulate_all(g, 1.0, std::nullopt, 1e4, reps, 77);
  // Replication-level spread of the occupancy fractions gives the interval.
  std::vector<Vector> occ;
  for (int r = 0; r < reps; ++r) {
    occ.push_back(sim::simulate_replication(g, pi, 1.0, std::nullopt, 1e4, 77 + r).occupancy);
  }
  for (int i = 0; i < 3; ++i) {
    double ss = 0.0;
    for (const auto& o : occ) ss += (o(i) - s.occupancy(i)) * (o(i) - s.occupancy(i));
    const double se = std::sqrt(ss / (reps - 1) / reps);
    EXPECT_LE(std::abs(s.occupancy(i) - pi[i]), 3.0 * se) << i;
  }
  EXPECT_NEAR(s.occupancy.sum(), 1.0, 1e-9);
}

TEST(Simulator, FwsOrderedBelowFweBelowFwc) {
  const auto g = testing::two_state(0.5, 2.0);
  const auto s = sim::simulate_all(g, 0.4, ProximityMatrix::identity(2), 2e3, 3, 5);
  EXPECT_LE(s.fws.mean, s.fwe.mean);
  EXPECT_EQ(s.fwe.mean, s.fwc.mean);
}

TEST(Simulator, Errors) {
  const auto g = testing::two_state(1, 1);
  EXPECT_EQ(error_of([&] { sim::simulate_freshness(g, 1.0, Model::FWC, std::nullopt, 10, 1, 0); }),
            Errc::MissingProximity);
  EXPECT_EQ(error_of([&] { sim::simulate_freshness(g, 0.0, Model::FWE, std::nullopt, 10, 1, 0); }),
            Errc::NonPositiveParam);
  EXPECT_EQ(error_of([&] { sim::simulate_freshness(g, 1.0, Model::FWE, std::nullopt, -1, 1, 0); }),
            Errc::NonPositiveParam);
  EXPECT_EQ(error_of([&] { sim::simulate_freshness(g, 1.0, Model::FWE, std::nullopt, 10, 0, 0); }),
            Errc::NonPositiveParam);
}

TEST(Simulator, SingleReplicationHasNoInterval) {
  const auto est =
      sim::simulate_freshness(testing::two_state(1, 1), 1.0, Model::FWS, std::nullopt, 100, 1, 3);
  EXPECT_EQ(est.half_width_95, 0.0);
  EXPECT_GE(est.mean, 0.0);
  EXPECT_LE(est.mean, 1.0);
}

}  // namespace
}  // namespace ctmcfresh
