#pragma once

#include <cstdint>
#include <vector>

#include "graphspec/model.hpp"

namespace graphspec {

struct GraphEdge {
  std::int64_t i = 0;  // i < j always
  std::int64_t j = 0;
  std::int64_t multiplicity = 1;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Sparse undirected multigraph with planted atom labels. Edges are stored
/// once (i < j), sorted, with multiplicities merged.
struct SampledGraph {
  std::int64_t n = 0;
  std::vector<GraphEdge> edges;
  std::vector<int> labels;  // atom index per vertex
  std::uint64_t seed = 0;

  std::int64_t total_multiplicity() const;
  std::vector<std::int64_t> degrees() const;  // counts multiplicity

  friend bool operator==(const SampledGraph&, const SampledGraph&) = default;
};

/// Samples a graph with Poisson(k_i . k_j / two_m) edge counts per vertex
/// pair and no self-loops. Each block pair draws its Poisson total from a
/// substream of (seed, a, b) and places endpoints uniformly, which matches
/// the per-pair model by Poisson superposition and is O(edges + blocks^2).
SampledGraph sample_graph(const ModelSpec& model, std::uint64_t seed);

struct LabelDegreeStats {
  int label = 0;
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance
};

std::vector<LabelDegreeStats> degree_stats(const SampledGraph& graph);

}  // namespace graphspec
