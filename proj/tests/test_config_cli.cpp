#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctmcfresh/cli.hpp"
#include "ctmcfresh/config.hpp"
#include "test_util.hpp"

namespace ctmcfresh {
namespace {

using testing::error_of;
namespace fs = std::filesystem;

fs::path tmp_dir() {
  const fs::path dir = fs::path(CTMCFRESH_TEST_TMP) / "cli";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto path = tmp_dir() / name;
  std::ofstream(path) << text;
  return path;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kThreeState = R"({"sources": [{"id": "bd3",
  "generator": [[-1.95, 1.95, 0], [1, -2.95, 1.95], [0, 2, -2]], "model": "FWE"}]})";

TEST(Config, ParsesAndRoundTrips) {
  const auto doc = nlohmann::json::parse(R"({
    "sources": [
      {"id": "a", "generator": [[-1, 1], [2, -2]], "weight": 2, "model": "fwc",
       "proximity": {"band_v": 1}},
      {"id": "b", "generator": [[-1, 1], [1, -1]], "model": "FWS",
       "proximity": {"matrix": [[1, 0.3], [0.2, 1]]}}
    ],
    "budget": 3.5,
    "grids": {"lambda": [0.1, 1]}
  })");
  const auto cfg = config::parse(doc);
  ASSERT_EQ(cfg.sources.size(), 2U);
  EXPECT_EQ(cfg.sources[0].model, Model::FWC);
  EXPECT_EQ(cfg.sources[0].proximity->band_v, 1);
  EXPECT_EQ(cfg.sources[1].weight, 1.0);
  EXPECT_EQ(*cfg.budget, 3.5);
  EXPECT_EQ(config::parse(config::to_json(cfg)), cfg);

  const auto sources = config::build_sources(cfg);
  EXPECT_NEAR(sources[0].weight, 2.0 / 3.0, 1e-15);
}

TEST(Config, StructuralErrors) {
  using nlohmann::json;
  EXPECT_EQ(error_of([] { config::parse(json::parse(R"({"nosources": 1})")); }),
            Errc::ConfigParse);
  EXPECT_EQ(error_of([] {
              config::parse(json::parse(R"({"sources": [{"generator": [[-1, 1], [2]]}]})"));
            }),
            Errc::ConfigParse);
  EXPECT_EQ(error_of([] {
              config::parse(json::parse(R"({"sources": [{"generator": [[-1, "x"], [2, -2]]}]})"));
            }),
            Errc::ConfigParse);
  EXPECT_EQ(error_of([] { config::load("/nonexistent/cfg.json"); }), Errc::IoError);
}

TEST(Cli, FreshnessTable) {
  const auto cfg = write_file("bd3.json", kThreeState);
  const auto out = tmp_dir() / "bd3.csv";
  const auto r = run_cli({"freshness", cfg.string(), "--lambda-grid", "0.1,1,10", "--out",
                          out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(read_file(out));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "lambda,f_analytic,f_oracle");
  double prev = 0.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    double lambda, f, oracle_f;
    char c1, c2;
    std::istringstream(line) >> lambda >> c1 >> f >> c2 >> oracle_f;
    EXPECT_GT(f, prev);
    EXPECT_NEAR(f, oracle_f, 1e-9);
    prev = f;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Cli, FreshnessFwsNearZeroRate) {
  const auto cfg = write_file("fws.json", R"({"sources": [{"generator": [[-1, 1], [2, -2]],
      "model": "FWS"}]})");
  const auto r = run_cli({"freshness", cfg.string(), "--lambda-grid", "1e-9,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  double lambda, f;
  char c;
  std::istringstream(line) >> lambda >> c >> f;
  EXPECT_LT(f, 1e-8);
}

TEST(Cli, NegativeRateIsValidationError) {
  const auto cfg = write_file("neg.json", R"({"sources": [{"generator": [[1, -1], [2, -2]]}]})");
  const auto r = run_cli({"freshness", cfg.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("NegativeRate"), std::string::npos);
}

TEST(Cli, MalformedJsonIsParseError) {
  const auto cfg = write_file("broken.json", "{\"sources\": [");
  EXPECT_EQ(run_cli({"freshness", cfg.string()}).code, 2);
}

TEST(Cli, OptimizeSingleSource) {
  const auto cfg = write_file("one.json", kThreeState);
  const auto r = run_cli({"optimize", cfg.string(), "--budget", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bd3,FWE,1,5,1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("# system_freshness UNIFORM"), std::string::npos);
}

TEST(Cli, OptimizeZeroBudget) {
  const auto cfg = write_file("one0.json", kThreeState);
  const auto r = run_cli({"optimize", cfg.string(), "--budget", "0"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("InfeasibleBudget"), std::string::npos);
}

TEST(Cli, OptimizeNamesBentFwcSource) {
  const auto cfg = write_file("bent.json", R"({"sources": [
      {"id": "ok", "generator": [[-1, 1], [2, -2]]},
      {"id": "bent", "generator": [[-0.1, 0.1, 0], [0.1, -1.1, 1], [0, 1, -1]],
       "model": "FWC", "proximity": {"matrix": [[1, 1, 1], [1, 1, 0], [1, 0, 1]]}}]})");
  const auto r = run_cli({"optimize", cfg.string(), "--budget", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("NotConcave"), std::string::npos);
  EXPECT_NE(r.err.find("bent"), std::string::npos);
}

TEST(Cli, OptimizeSweepConfigIdlesSources) {
  const fs::path cfg = fs::path(CTMCFRESH_SOURCE_DIR) / "configs" / "two_state_sweep_n50.json";
  const auto r = run_cli({"optimize", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(",0,0\n"), std::string::npos);
}

TEST(Cli, SimulateDeterministic) {
  const auto cfg = write_file("two.json", R"({"sources": [{"generator": [[-1, 1], [1, -1]]}]})");
  const auto a = tmp_dir() / "sim_a.csv";
  const auto b = tmp_dir() / "sim_b.csv";
  const std::vector<std::string> base{"simulate", cfg.string(), "--lambda", "2", "--horizon",
                                      "1e4", "--reps", "20", "--seed", "9"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"--out", b.string()});
  ASSERT_EQ(run_cli(args_a).code, 0);
  ASSERT_EQ(run_cli(args_b).code, 0);
  const auto text = read_file(a);
  EXPECT_EQ(text, read_file(b));

  std::istringstream csv(text);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "model,lambda,mean,half_width_95,horizon,replications,seed");
  std::getline(csv, line);
  std::istringstream row(line);
  std::string model, field;
  std::getline(row, model, ',');
  std::getline(row, field, ',');
  std::getline(row, field, ',');
  const double mean = std::stod(field);
  std::getline(row, field, ',');
  const double half = std::stod(field);
  EXPECT_EQ(model, "FWE");
  EXPECT_LE(std::abs(mean - 0.75), 3.0 * half / 1.96);
}

TEST(Cli, SimulateFwcWithoutProximity) {
  const auto cfg = write_file("fwc.json", R"({"sources": [{"generator": [[-1, 1], [1, -1]],
      "model": "FWC"}]})");
  const auto r = run_cli({"simulate", cfg.string(), "--lambda", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("MissingProximity"), std::string::npos);
}

TEST(Cli, UnknownExperimentPrintsUsage) {
  const auto r = run_cli({"experiment", "fig9"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("fig3"), std::string::npos);
}

TEST(Cli, UnwritableOutputIsIoError) {
  const auto cfg = write_file("io.json", kThreeState);
  const auto r = run_cli({"freshness", cfg.string(), "--out", "/nonexistent/dir/x.csv"});
  EXPECT_EQ(r.code, 4);
}

TEST(Cli, ExperimentFig6) {
  const auto dir = tmp_dir() / "fig6";
  const auto r = run_cli({"experiment", "fig6", "--out-dir", dir.string(), "--servers", "4"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(fs::exists(dir / "fig6.csv"));
  EXPECT_NE(r.out.find("fig6 PASS"), std::string::npos);
}

}  // namespace
}  // namespace ctmcfresh
