#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "graphspec/model.hpp"
#include "graphspec/resolvent.hpp"

namespace graphspec {

struct OutlierEntry {
  int r = 0;             // 1-based rank by descending alpha
  double alpha = 0.0;
  std::optional<double> z;
  bool visible = false;  // 1/alpha < g_max - 1e-6
  bool marginal = false; // within the 1e-6 band around the threshold
  bool degenerate = false;  // alpha repeated within 1e-9 relative
};

struct OutlierReport {
  double g_max = 0.0;
  double band_edge = 0.0;
  std::vector<OutlierEntry> entries;  // ordered by r, hence z descending
};

/// Real-axis Stieltjes transform above the band, eps = 0, branch continued
/// from large z. Strictly decreasing there.
double stieltjes_g_real(double z, const ModelSpec& model, const SolveOptions& opts = {});

/// Largest real value of g, attained at the upper band edge: evaluated on a
/// decreasing delta ladder and extrapolated through the square-root approach
/// g(edge + delta) ~ g_max - a sqrt(delta).
double g_max_at_edge(const ModelSpec& model, const Band& band, const SolveOptions& opts = {});

/// Solves g(z_r) = 1/alpha_r above the band for every visible alpha.
OutlierReport outlier_eigenvalues(const ModelSpec& model, const Band& band,
                                  const SolveOptions& opts = {});

/// theta* = sqrt(c / g_max) for the symmetric two-community family with the
/// given kappa atoms; below it the second outlier is inside the band.
double detectability_threshold(const std::vector<std::pair<double, double>>& kappa_atoms,
                               const SolveOptions& opts = {});

struct Transition {
  int r = 0;          // which alpha disappears
  double strength = 0.0;
};

/// Sweeps a parametrized family and locates, for each r >= 2, the strength at
/// which outlier r meets the band edge (1/alpha_r = g_max). Sorted by
/// disappearance order as the structure weakens: smallest alpha first.
std::vector<Transition> transition_sequence(const std::function<ModelSpec(double)>& family,
                                            const std::vector<double>& sweep,
                                            const SolveOptions& opts = {});

}  // namespace graphspec
