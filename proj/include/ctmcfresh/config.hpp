#pragma once

// JSON problem configuration:
//
//   {
//     "sources": [
//       {"id": "a", "generator": [[-1, 1], [2, -2]], "weight": 1.0, "model": "FWC",
//        "proximity": {"band_v": 1}}            // or {"matrix": [[...]]}
//     ],
//     "budget": 5.0,                              // optional
//     "grids": {"lambda": [0.1, 1, 10]}           // optional
//   }

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctmcfresh/ctmc.hpp"
#include "ctmcfresh/freshness.hpp"
#include "ctmcfresh/source.hpp"

namespace ctmcfresh::config {

struct ProximityConfig {
  std::optional<int> band_v;
  std::optional<Matrix> matrix;

  friend bool operator==(const ProximityConfig& a, const ProximityConfig& b);
};

struct SourceConfig {
  std::string id;
  Matrix generator;
  double weight = 1.0;
  Model model = Model::FWE;
  std::optional<ProximityConfig> proximity;

  friend bool operator==(const SourceConfig& a, const SourceConfig& b);
};

struct ProblemConfig {
  std::vector<SourceConfig> sources;
  std::optional<double> budget;
  std::optional<std::vector<double>> lambda_grid;

  bool operator==(const ProblemConfig&) const = default;
};

/// Structural problems (missing fields, wrong types, ragged rows) throw
/// ConfigParse. Numeric validity is checked later when sources are built.
ProblemConfig parse(const nlohmann::json& doc);
ProblemConfig load(const std::filesystem::path& file);
nlohmann::json to_json(const ProblemConfig& cfg);

Generator build_generator(const SourceConfig& src);
std::optional<ProximityMatrix> build_proximity(const SourceConfig& src, int states);
SourceSpec build_source(const SourceConfig& src);
/// All sources with weights normalized to sum to one.
std::vector<SourceSpec> build_sources(const ProblemConfig& cfg);

}  // namespace ctmcfresh::config
