#pragma once

#include <cstdint>
#include <vector>

#include "graphspec/generator.hpp"
#include "graphspec/model.hpp"

namespace graphspec {

struct EigenOptions {
  std::int64_t dense_limit = 5000;
  double lanczos_tol = 1e-8;      // residual per pair, relative to ||A||
  int lanczos_max_subspace = 400;
};

/// Eigenvalues of one sampled adjacency matrix: either the full spectrum
/// (dense solve) or the top_k Ritz pairs from Lanczos with full
/// reorthogonalization.
struct EmpiricalSpectrum {
  std::vector<double> eigenvalues;  // descending
  bool full = true;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> residuals;  // top_k mode only
};

EmpiricalSpectrum eigen_spectrum_full(const SampledGraph& graph, const EigenOptions& opts = {});
EmpiricalSpectrum eigen_spectrum_topk(const SampledGraph& graph, int k,
                                      const EigenOptions& opts = {});

struct LanczosResult {
  std::vector<double> values;     // descending
  Eigen::MatrixXd vectors;        // n x k, columns match values
  std::vector<double> residuals;  // ||A v - lambda v||
};

LanczosResult lanczos_topk(const SampledGraph& graph, int k, const EigenOptions& opts = {});

struct Histogram {
  std::vector<double> edges;    // bins + 1 entries
  std::vector<double> density;  // area-normalized over included eigenvalues
  std::int64_t included = 0;
};

/// Density-normalized histogram of the eigenvalues with the top `exclude_top`
/// removed (they carry weight q/n and distort band comparison).
Histogram spectral_histogram(const std::vector<double>& eigenvalues_desc, int bins,
                             int exclude_top);

struct RecoveryResult {
  double accuracy = 0.0;          // for q = 2, max over the label swap
  std::vector<int> assignment;    // community per vertex
};

/// Spectral community detection: q = 2 uses the sign of the eigenvector
/// paired with the second-largest eigenvalue; q > 2 clusters rows of the
/// top-q eigenvector matrix. Accuracy is measured against `planted`, max over
/// community relabelings (exhaustive for q <= 5).
RecoveryResult detect_communities(const SampledGraph& graph, int q,
                                  const std::vector<int>& planted,
                                  const EigenOptions& opts = {});

/// Planted community for each vertex: atom index mod q (both convenience
/// builders order atoms so this is the group id).
std::vector<int> planted_communities(const SampledGraph& graph, int q);

/// Verifies eigenvalue interlacing between X and X + alpha u u^T, where X is
/// a centered sample (A - <A>) at small n and u a seeded unit vector.
bool interlacing_check(std::int64_t n_small, const ModelSpec& model, double alpha,
                       std::uint64_t seed);

Eigen::MatrixXd dense_adjacency(const SampledGraph& graph);

}  // namespace graphspec
