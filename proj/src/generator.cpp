#include "graphspec/generator.hpp"

#include <algorithm>
#include <cmath>

#include "graphspec/rng.hpp"

namespace graphspec {

std::int64_t SampledGraph::total_multiplicity() const {
  std::int64_t total = 0;
  for (const auto& e : edges) total += e.multiplicity;
  return total;
}

std::vector<std::int64_t> SampledGraph::degrees() const {
  std::vector<std::int64_t> deg(n, 0);
  for (const auto& e : edges) {
    deg[e.i] += e.multiplicity;
    deg[e.j] += e.multiplicity;
  }
  return deg;
}

SampledGraph sample_graph(const ModelSpec& model, std::uint64_t seed) {
  const auto counts = model.atom_counts();
  const std::size_t blocks = model.atoms.size();
  std::vector<std::int64_t> offsets(blocks + 1, 0);
  for (std::size_t a = 0; a < blocks; ++a) offsets[a + 1] = offsets[a] + counts[a];

  SampledGraph graph;
  graph.n = model.n;
  graph.seed = seed;
  graph.labels.resize(model.n);
  for (std::size_t a = 0; a < blocks; ++a) {
    std::fill(graph.labels.begin() + offsets[a], graph.labels.begin() + offsets[a + 1],
              static_cast<int>(a));
  }

  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  for (std::size_t a = 0; a < blocks; ++a) {
    for (std::size_t b = a; b < blocks; ++b) {
      const std::int64_t na = counts[a];
      const std::int64_t nb = counts[b];
      const double rate = model.atoms[a].k.dot(model.atoms[b].k) / model.two_m;
      const double pairs = (a == b) ? 0.5 * double(na) * double(na - 1) : double(na) * double(nb);
      const double mean = pairs * rate;
      if (!(mean > 0.0)) continue;
      Rng rng(substream_seed(seed, a, b));
      const long long edge_count = rng.poisson(mean);
      raw.reserve(raw.size() + static_cast<std::size_t>(edge_count));
      for (long long e = 0; e < edge_count; ++e) {
        std::int64_t i, j;
        if (a == b) {
          do {
            i = offsets[a] + static_cast<std::int64_t>(rng.uniform_below(na));
            j = offsets[a] + static_cast<std::int64_t>(rng.uniform_below(na));
          } while (i == j);
        } else {
          i = offsets[a] + static_cast<std::int64_t>(rng.uniform_below(na));
          j = offsets[b] + static_cast<std::int64_t>(rng.uniform_below(nb));
        }
        if (i > j) std::swap(i, j);
        raw.emplace_back(i, j);
      }
    }
  }

  std::sort(raw.begin(), raw.end());
  graph.edges.reserve(raw.size());
  for (const auto& [i, j] : raw) {
    if (!graph.edges.empty() && graph.edges.back().i == i && graph.edges.back().j == j) {
      graph.edges.back().multiplicity += 1;
    } else {
      graph.edges.push_back({i, j, 1});
    }
  }
  return graph;
}

std::vector<LabelDegreeStats> degree_stats(const SampledGraph& graph) {
  int max_label = -1;
  for (int label : graph.labels) max_label = std::max(max_label, label);
  std::vector<LabelDegreeStats> stats(max_label + 1);
  for (int l = 0; l <= max_label; ++l) stats[l].label = l;

  const auto deg = graph.degrees();
  for (std::int64_t v = 0; v < graph.n; ++v) {
    auto& s = stats[graph.labels[v]];
    s.count += 1;
    s.mean += static_cast<double>(deg[v]);
  }
  for (auto& s : stats) {
    if (s.count > 0) s.mean /= static_cast<double>(s.count);
  }
  for (std::int64_t v = 0; v < graph.n; ++v) {
    auto& s = stats[graph.labels[v]];
    const double d = static_cast<double>(deg[v]) - s.mean;
    s.variance += d * d;
  }
  for (auto& s : stats) {
    s.variance = s.count > 1 ? s.variance / static_cast<double>(s.count - 1) : 0.0;
  }
  return stats;
}

}  // namespace graphspec
