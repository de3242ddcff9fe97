#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "graphspec/model.hpp"

namespace graphspec {

struct SolveOptions {
  double tol = 1e-12;      // sup-norm fixed-point defect
  int max_iter = 100000;
  double damping = 0.5;    // halved on oscillation detection
  int newton_after = 300;  // switch to Newton once plain iteration stalls
};

/// Converged solution of h = (1/c) sum_a w_a k_a / (z - k_a . h).
struct HSolution {
  std::complex<double> z;
  Eigen::VectorXcd h;
  double residual = 0.0;
  int iterations = 0;
};

/// Solves the self-consistent equation at z (Im z >= 0; strictly positive for
/// band evaluation, zero only on the real axis outside the band). The branch
/// is fixed by the 1/z asymptotic start (or the caller's warm start) plus the
/// Im g <= 0 physicality test.
HSolution solve_h(std::complex<double> z, const ModelSpec& model,
                  const Eigen::VectorXcd* warm_start = nullptr,
                  const SolveOptions& opts = {});

/// Stieltjes transform g = (1 + c (h.h)) / z with the unconjugated square.
std::complex<double> stieltjes_g(const HSolution& solution, const ModelSpec& model);

/// Same quantity from the atom-sum form g = sum_a w_a / (z - k_a . h).
std::complex<double> stieltjes_g_direct(const HSolution& solution, const ModelSpec& model);

/// Spectral density at x: -(1/pi) Im g(x + i eps).
double density_at(double x, const ModelSpec& model, double epsilon,
                  const Eigen::VectorXcd* warm_start = nullptr,
                  const SolveOptions& opts = {});

/// Cross-check form -(c/(pi x)) Im (h.h); equals density_at only in the
/// eps -> 0 limit and away from x = 0.
double density_from_h_norm(double x, const ModelSpec& model, double epsilon,
                           const SolveOptions& opts = {});

struct DensityGrid {
  double lo;
  double hi;
  int points;
};

struct DensityCurve {
  std::vector<double> xs;
  std::vector<double> rho;
  double epsilon = 0.0;
  std::vector<int> failed;  // grid indices that did not converge
};

/// Two-pass sweep: a serial coarse pass with continuation warm starts moving
/// into the band from both sides, then a parallel fine pass warm-started from
/// the nearest coarse solution. Fails if more than 1% of points do not
/// converge.
DensityCurve density_curve(const ModelSpec& model, const DensityGrid& grid, double epsilon,
                           int threads = 0, const SolveOptions& opts = {});

struct Band {
  std::vector<std::pair<double, double>> intervals;  // sorted, disjoint

  double lower_edge() const;
  double upper_edge() const;
  double width() const;
};

/// Locates the support of rho by thresholding at rho_cut = 1e-3 max(rho) and
/// bisecting each edge across a decreasing broadening ladder. Edges are
/// accurate to ~1e-3 sqrt(c).
Band find_band_edges(const ModelSpec& model,
                     std::optional<std::pair<double, double>> search = std::nullopt,
                     std::vector<double> epsilon_sequence = {},
                     const SolveOptions& opts = {});

/// Default broadening ladder for edge refinement, proportional to sqrt(c).
std::vector<double> default_epsilon_sequence(const ModelSpec& model);

}  // namespace graphspec
