#include "ctmcfresh/config.hpp"

#include <fstream>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh::config {
namespace {

using nlohmann::json;

Matrix parse_matrix(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) {
    throw Error(Errc::ConfigParse, what + " must be a nonempty array of rows");
  }
  const auto n_rows = rows.size();
  const auto n_cols = rows[0].is_array() ? rows[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < n_rows; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != n_cols || n_cols == 0) {
      throw Error(Errc::ConfigParse, what + " row " + std::to_string(i) + " is ragged or empty");
    }
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (!row[j].is_number()) {
        throw Error(Errc::ConfigParse, what + " entry (" + std::to_string(i) + "," +
                                           std::to_string(j) + ") is not a number");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

SourceConfig parse_source(const json& node, std::size_t index) {
  if (!node.is_object()) {
    throw Error(Errc::ConfigParse, "sources[" + std::to_string(index) + "] is not an object");
  }
  SourceConfig src;
  src.id = node.contains("id") ? node.at("id").get<std::string>() : "s" + std::to_string(index + 1);
  if (!node.contains("generator")) {
    throw Error(Errc::ConfigParse, "source '" + src.id + "' has no generator");
  }
  src.generator = parse_matrix(node.at("generator"), "source '" + src.id + "' generator");
  if (node.contains("weight")) {
    if (!node.at("weight").is_number()) {
      throw Error(Errc::ConfigParse, "source '" + src.id + "' weight is not a number");
    }
    src.weight = node.at("weight").get<double>();
  }
  if (node.contains("model")) {
    try {
      src.model = parse_model(node.at("model").get<std::string>());
    } catch (const Error& e) {
      throw Error(Errc::ConfigParse, e.what());
    }
  }
  if (node.contains("proximity")) {
    const auto& p = node.at("proximity");
    ProximityConfig prox;
    if (p.contains("band_v")) {
      if (!p.at("band_v").is_number_integer()) {
        throw Error(Errc::ConfigParse, "proximity band_v must be an integer");
      }
      prox.band_v = p.at("band_v").get<int>();
    } else if (p.contains("matrix")) {
      prox.matrix = parse_matrix(p.at("matrix"), "source '" + src.id + "' proximity");
    } else {
      throw Error(Errc::ConfigParse, "proximity needs 'band_v' or 'matrix'");
    }
    src.proximity = std::move(prox);
  }
  return src;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

bool operator==(const ProximityConfig& a, const ProximityConfig& b) {
  if (a.band_v != b.band_v || a.matrix.has_value() != b.matrix.has_value()) return false;
  return !a.matrix || same_matrix(*a.matrix, *b.matrix);
}

bool operator==(const SourceConfig& a, const SourceConfig& b) {
  return a.id == b.id && same_matrix(a.generator, b.generator) && a.weight == b.weight &&
         a.model == b.model && a.proximity == b.proximity;
}

ProblemConfig parse(const json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("sources") || !doc.at("sources").is_array()) {
      throw Error(Errc::ConfigParse, "config needs a 'sources' array");
    }
    ProblemConfig cfg;
    const auto& sources = doc.at("sources");
    for (std::size_t i = 0; i < sources.size(); ++i) cfg.sources.push_back(parse_source(sources[i], i));
    if (cfg.sources.empty()) throw Error(Errc::ConfigParse, "config lists no sources");
    if (doc.contains("budget")) {
      if (!doc.at("budget").is_number()) throw Error(Errc::ConfigParse, "budget is not a number");
      cfg.budget = doc.at("budget").get<double>();
    }
    if (doc.contains("grids") && doc.at("grids").contains("lambda")) {
      cfg.lambda_grid = doc.at("grids").at("lambda").get<std::vector<double>>();
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, e.what());
  }
}

ProblemConfig load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoError, "cannot read '" + file.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, e.what());
  }
  return parse(doc);
}

json to_json(const ProblemConfig& cfg) {
  json doc;
  doc["sources"] = json::array();
  for (const auto& s : cfg.sources) {
    json node;
    node["id"] = s.id;
    node["generator"] = matrix_to_json(s.generator);
    node["weight"] = s.weight;
    node["model"] = std::string(to_string(s.model));
    if (s.proximity) {
      if (s.proximity->band_v) {
        node["proximity"]["band_v"] = *s.proximity->band_v;
      } else if (s.proximity->matrix) {
        node["proximity"]["matrix"] = matrix_to_json(*s.proximity->matrix);
      }
    }
    doc["sources"].push_back(std::move(node));
  }
  if (cfg.budget) doc["budget"] = *cfg.budget;
  if (cfg.lambda_grid) doc["grids"]["lambda"] = *cfg.lambda_grid;
  return doc;
}

Generator build_generator(const SourceConfig& src) { return Generator::validate(src.generator); }

std::optional<ProximityMatrix> build_proximity(const SourceConfig& src, int states) {
  if (!src.proximity) return std::nullopt;
  if (src.proximity->band_v) return proximity_band(states, *src.proximity->band_v);
  const Matrix& m = *src.proximity->matrix;
  if (m.rows() != states || m.cols() != states) {
    throw Error(Errc::DimensionMismatch, "proximity of source '" + src.id + "' does not match " +
                                             std::to_string(states) + " states");
  }
  return ProximityMatrix::from_matrix(m);
}

SourceSpec build_source(const SourceConfig& src) {
  Generator g = build_generator(src);
  auto prox = build_proximity(src, g.size());
  return make_source(src.id, std::move(g), src.weight, src.model, std::move(prox));
}

std::vector<SourceSpec> build_sources(const ProblemConfig& cfg) {
  std::vector<SourceSpec> out;
  out.reserve(cfg.sources.size());
  for (const auto& s : cfg.sources) out.push_back(build_source(s));
  normalize_weights(out);
  return out;
}

}  // namespace ctmcfresh::config
