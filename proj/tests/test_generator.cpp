#include <doctest.h>

#include <cmath>
#include <vector>

#include "graphspec/generator.hpp"
#include "graphspec/model.hpp"

using namespace graphspec;

namespace {

ModelSpec fig1_model(std::int64_t n = 10000) {
  return build_two_community_model({{60.0, 0.5}, {120.0, 0.5}}, 50.0, n);
}

/// Two-block q=1 model with block-pair edge means 1.0 (aa), 6.0 (ab), 4.0 (bb)
/// at n = 6: k = (3, 6) with equal weights gives two_m = 27.
ModelSpec tiny_model() {
  Eigen::VectorXd a(1), b(1);
  a << 3.0;
  b << 6.0;
  return build_model({{a, 0.5}, {b, 0.5}}, 6);
}

}  // namespace

TEST_CASE("sampling is deterministic in (model, seed)") {
  const ModelSpec model = fig1_model(2000);
  const SampledGraph g1 = sample_graph(model, 42);
  const SampledGraph g2 = sample_graph(model, 42);
  CHECK(g1 == g2);
  const SampledGraph g3 = sample_graph(model, 43);
  CHECK(g1.edges != g3.edges);
}

TEST_CASE("edge list structure") {
  const SampledGraph graph = sample_graph(fig1_model(2000), 7);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    CHECK(graph.edges[e].i < graph.edges[e].j);  // no self-loops, stored once
    CHECK(graph.edges[e].multiplicity >= 1);
    if (e > 0) {
      const bool sorted = graph.edges[e - 1].i < graph.edges[e].i ||
                          (graph.edges[e - 1].i == graph.edges[e].i &&
                           graph.edges[e - 1].j < graph.edges[e].j);
      CHECK(sorted);
    }
  }
  CHECK(graph.labels.size() == 2000);
}

TEST_CASE("orthogonal blocks never connect") {
  Eigen::VectorXd a(2), b(2);
  a << 5.0, 0.0;
  b << 0.0, 5.0;
  const ModelSpec model = build_model({{a, 0.5}, {b, 0.5}}, 400);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SampledGraph graph = sample_graph(model, seed);
    for (const auto& e : graph.edges) {
      CHECK(graph.labels[e.i] == graph.labels[e.j]);
    }
  }
}

TEST_CASE("fig1 sample degree statistics") {
  const ModelSpec model = fig1_model();
  const SampledGraph graph = sample_graph(model, 2024);
  const double mean_degree =
      2.0 * static_cast<double>(graph.total_multiplicity()) / static_cast<double>(graph.n);
  CHECK(mean_degree > 89.0);
  CHECK(mean_degree < 91.0);

  // Atom order is (60,+50),(60,-50),(120,+50),(120,-50): labels 0,1 have
  // expected degree 60 and labels 2,3 have 120.
  const auto stats = degree_stats(graph);
  REQUIRE(stats.size() == 4);
  for (const auto& s : stats) {
    const double expected = s.label < 2 ? 60.0 : 120.0;
    const double stderr_mean = std::sqrt(s.variance / static_cast<double>(s.count));
    CHECK(std::abs(s.mean - expected) < 3.0 * stderr_mean + 0.05);
  }
}

TEST_CASE("degree statistics do not depend on theta") {
  for (double theta : {0.0, 25.0, 50.0}) {
    const ModelSpec model = build_two_community_model({{60.0, 0.5}, {120.0, 0.5}}, theta, 10000);
    const auto stats = degree_stats(sample_graph(model, 99));
    for (const auto& s : stats) {
      const double expected = s.label < 2 ? 60.0 : 120.0;
      const double stderr_mean = std::sqrt(s.variance / static_cast<double>(s.count));
      CHECK(std::abs(s.mean - expected) < 4.0 * stderr_mean + 0.05);
    }
  }
}

TEST_CASE("empty graph degree stats") {
  Eigen::VectorXd tiny(1);
  tiny << 1e-4;
  const ModelSpec model = build_model({{tiny, 1.0}}, 50);
  const SampledGraph graph = sample_graph(model, 5);  // mean edges ~ 2.5e-3
  const auto stats = degree_stats(graph);
  if (graph.edges.empty()) {
    CHECK(stats[0].mean == 0.0);
  }
}

TEST_CASE("block pair totals are Poisson") {
  // Chi-square test of the per-block-pair edge totals over 1e5 seeds against
  // the Poisson pmf, pooled so every bin expects >= 5 counts. Critical values
  // are the 0.999 chi-square quantiles for the pooled bin counts.
  const ModelSpec model = tiny_model();
  const int n_samples = 100000;

  const std::vector<std::vector<double>> probs = {
      // mean 1.0 (aa): bins 0..6 and >= 7
      {3.678794411714e-01, 3.678794411714e-01, 1.839397205857e-01, 6.131324019524e-02,
       1.532831004881e-02, 3.065662009762e-03, 5.109436682937e-04, 8.324114928804e-05},
      // mean 6.0 (ab): bins 0..17 and >= 18
      {2.478752176666e-03, 1.487251306000e-02, 4.461753917999e-02, 8.923507835999e-02,
       1.338526175400e-01, 1.606231410480e-01, 1.606231410480e-01, 1.376769780411e-01,
       1.032577335308e-01, 6.883848902056e-02, 4.130309341234e-02, 2.252896004309e-02,
       1.126448002155e-02, 5.198990779175e-03, 2.228138905361e-03, 8.912555621443e-04,
       3.342208358041e-04, 1.179602949897e-04, 5.691714042400e-05},
      // mean 4.0 (bb): bins 0..13 and >= 14
      {1.831563888873e-02, 7.326255555494e-02, 1.465251111099e-01, 1.953668148132e-01,
       1.953668148132e-01, 1.562934518505e-01, 1.041956345670e-01, 5.954036260973e-02,
       2.977018130486e-02, 1.323119169105e-02, 5.292476676420e-03, 1.924536973244e-03,
       6.415123244146e-04, 1.973884075122e-04, 7.632841534366e-05}};
  const std::vector<double> critical = {24.321886, 42.312396, 36.123274};

  // pair index: 0 = within block a, 1 = cross, 2 = within block b
  std::vector<std::vector<std::int64_t>> counts(3);
  for (int p = 0; p < 3; ++p) counts[p].assign(probs[p].size(), 0);

  double total_edges = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const SampledGraph graph = sample_graph(model, static_cast<std::uint64_t>(s));
    std::int64_t per_pair[3] = {0, 0, 0};
    for (const auto& e : graph.edges) {
      const int li = graph.labels[e.i], lj = graph.labels[e.j];
      per_pair[li == lj ? 2 * li : 1] += e.multiplicity;
    }
    total_edges += static_cast<double>(per_pair[0] + per_pair[1] + per_pair[2]);
    for (int p = 0; p < 3; ++p) {
      const auto bin = std::min<std::size_t>(per_pair[p], counts[p].size() - 1);
      counts[p][bin] += 1;
    }
  }

  for (int p = 0; p < 3; ++p) {
    double chi2 = 0.0;
    for (std::size_t b = 0; b < probs[p].size(); ++b) {
      const double expected = n_samples * probs[p][b];
      const double diff = static_cast<double>(counts[p][b]) - expected;
      chi2 += diff * diff / expected;
    }
    INFO("pair ", p, " chi2 = ", chi2);
    CHECK(chi2 < critical[p]);
  }

  // Mean total edge count matches the sum of the block means (1 + 6 + 4).
  const double avg = total_edges / n_samples;
  CHECK(std::abs(avg - 11.0) < 0.05);
}
