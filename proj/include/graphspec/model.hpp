#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "graphspec/errors.hpp"

namespace graphspec {

/// One atom of the parameter distribution: a q-component vector and the
/// population fraction of vertices carrying it.
struct ParamAtom {
  Eigen::VectorXd k;
  double weight = 0.0;
};

/// Construction record kept when a model comes from the symmetric
/// two-community parametrization (kappa, +/-theta).
struct TwoCommunityInfo {
  std::vector<std::pair<double, double>> kappa_atoms;  // (kappa, weight) before the split
  double theta = 0.0;
};

/// Validated generative model. Edge counts between vertices i and j are
/// Poisson with mean k_i . k_j / two_m.
struct ModelSpec {
  std::int64_t n = 0;
  int q = 0;
  std::vector<ParamAtom> atoms;
  double two_m = 0.0;  // n * |sum_a w_a k_a|
  double c = 0.0;      // two_m / n, the average degree
  std::optional<TwoCommunityInfo> two_community;

  Eigen::VectorXd mean_vector() const;
  /// Vertices per atom by largest-remainder rounding of weight * n; sums to n.
  std::vector<std::int64_t> atom_counts() const;
  double max_atom_norm() const;
};

/// Low-rank structure of the expected adjacency matrix: its nonzero
/// eigenvalues equal those of the q x q Gram matrix (1/c) sum_a w_a k_a k_a^T.
struct RankQStructure {
  Eigen::VectorXd alphas;  // descending
  Eigen::MatrixXd gram;
};

ModelSpec build_model(std::vector<ParamAtom> atoms, std::int64_t n);

/// Two equal communities with vectors (kappa, +theta) and (kappa, -theta);
/// each kappa atom's weight is split in half across the two signs.
ModelSpec build_two_community_model(const std::vector<std::pair<double, double>>& kappa_atoms,
                                    double theta, std::int64_t n);

/// q groups along regular-simplex directions with pairwise angle phi; each
/// magnitude atom is split equally across the q directions.
ModelSpec build_simplex_model(int q, double phi,
                              const std::vector<std::pair<double, double>>& magnitude_atoms,
                              std::int64_t n);

RankQStructure rank_structure(const ModelSpec& model);

/// Unit vectors with pairwise dot products cos(phi); requires cos(phi) >= 0.
std::vector<Eigen::VectorXd> simplex_directions(int q, double phi);

/// Dense expected adjacency matrix; intended for small n (tests, oracles).
Eigen::MatrixXd mean_adjacency(const ModelSpec& model);

}  // namespace graphspec
