#pragma once

#include <string>

#include <json.hpp>

#include "graphspec/generator.hpp"
#include "graphspec/model.hpp"
#include "graphspec/resolvent.hpp"

namespace graphspec {

/// Reproducibility stamp carried by every output file, either as a JSON
/// "meta" object or as '#' header comments in CSV.
struct OutputMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;

  nlohmann::json to_json() const;
  std::string csv_header() const;
};

/// SHA-256 of the canonical (sorted-key, compact) serialization.
std::string config_hash(const nlohmann::json& config);

/// Model config: {"n": ..., "atoms": [{"k": [...], "weight": ...}]} or the
/// convenience forms {"two_community": {...}} / {"simplex": {...}}.
ModelSpec model_from_json(const nlohmann::json& config);
ModelSpec load_model_file(const std::string& path);
nlohmann::json model_to_json(const ModelSpec& model);

/// n, q, c, two_m, alphas summary.
nlohmann::json describe_model(const ModelSpec& model);

void write_graph_csv(const SampledGraph& graph, const std::string& path, const OutputMeta& meta);
SampledGraph read_graph_csv(const std::string& path);

void write_density_csv(const DensityCurve& curve, const std::string& path,
                       const OutputMeta& meta);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace graphspec
