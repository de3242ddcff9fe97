#include "graphspec/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "graphspec/util.hpp"

namespace graphspec {

namespace {

/// Caches the last converged h so nearby real-axis evaluations warm-start.
class RealAxisG {
 public:
  RealAxisG(const ModelSpec& model, const SolveOptions& opts) : model_(model), opts_(opts) {}

  double operator()(double z) {
    const Eigen::VectorXcd* warm = nullptr;
    if (have_last_ && std::abs(z - last_z_) < 0.5 * std::sqrt(model_.c)) warm = &last_h_;
    if (warm == nullptr) {
      // Continuation from far out on the real axis keeps the 1/z branch.
      const double far = std::abs(z) + 10.0 * std::sqrt(model_.c) + model_.max_atom_norm();
      Eigen::VectorXcd h;
      const Eigen::VectorXcd* step_warm = nullptr;
      for (double zs = far; zs > z; zs = std::max(z, z + (zs - z) * 0.5)) {
        const HSolution sol = solve_h({zs, 0.0}, model_, step_warm, opts_);
        h = sol.h;
        step_warm = &h;
        if (zs - z < 1e-12 * std::max(1.0, std::abs(z))) break;
      }
      last_h_ = h;
      have_last_ = true;
    }
    const HSolution sol = solve_h({z, 0.0}, model_, have_last_ ? &last_h_ : nullptr, opts_);
    last_h_ = sol.h;
    last_z_ = z;
    have_last_ = true;
    return stieltjes_g(sol, model_).real();
  }

 private:
  const ModelSpec& model_;
  SolveOptions opts_;
  Eigen::VectorXcd last_h_;
  double last_z_ = 0.0;
  bool have_last_ = false;
};

}  // namespace

double stieltjes_g_real(double z, const ModelSpec& model, const SolveOptions& opts) {
  RealAxisG g(model, opts);
  return g(z);
}

double g_max_at_edge(const ModelSpec& model, const Band& band, const SolveOptions& opts) {
  const double edge = band.upper_edge();
  const double scale = std::sqrt(model.c);
  const std::vector<double> deltas = {1e-2 * scale, 1e-3 * scale, 1e-4 * scale};
  RealAxisG g(model, opts);
  std::vector<double> sqrt_deltas, values;
  for (double delta : deltas) {
    sqrt_deltas.push_back(std::sqrt(delta));
    values.push_back(g(edge + delta));
  }
  return fit_line(sqrt_deltas, values).intercept;
}

OutlierReport outlier_eigenvalues(const ModelSpec& model, const Band& band,
                                  const SolveOptions& opts) {
  const RankQStructure rank = rank_structure(model);
  OutlierReport report;
  report.band_edge = band.upper_edge();
  report.g_max = g_max_at_edge(model, band, opts);

  RealAxisG g(model, opts);
  const double scale = std::sqrt(model.c);
  // Must stay above the band-edge estimation error (~1e-5 sqrt(c)); points
  // below it can land inside the true band where no real branch exists.
  const double delta_min = 5e-5 * scale;
  const double threshold_tol = 1e-6;

  for (int idx = 0; idx < rank.alphas.size(); ++idx) {
    OutlierEntry entry;
    entry.r = idx + 1;
    entry.alpha = rank.alphas(idx);
    for (int other = 0; other < rank.alphas.size(); ++other) {
      if (other != idx &&
          std::abs(rank.alphas(other) - entry.alpha) <= 1e-9 * std::max(1.0, entry.alpha)) {
        entry.degenerate = true;
      }
    }
    if (entry.alpha > 0.0) {
      const double target = 1.0 / entry.alpha;
      entry.marginal = std::abs(target - report.g_max) <= threshold_tol;
      entry.visible = target < report.g_max - threshold_tol;
      if (entry.visible) {
        double lo = report.band_edge + delta_min;
        double g_lo = 0.0;
        for (int attempt = 0;; ++attempt) {
          try {
            g_lo = g(lo);
            break;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoConvergence || attempt >= 4) throw;
            lo = report.band_edge + (lo - report.band_edge) * 2.0;
          }
        }
        if (g_lo < target) {
          // Root closer to the edge than the square-root singularity lets us
          // resolve; report the edge and flag it.
          entry.z = lo;
          entry.marginal = true;
        } else {
          double hi = std::max(lo * (1.0 + 1e-9), entry.alpha + model.c + 2.0 * scale);
          double g_hi = g(hi);
          int expansions = 0;
          while (g_hi >= target) {
            if (g_hi > g_lo + 1e-12) {
              raise(ErrorKind::BracketFailure, "g not decreasing while expanding bracket");
            }
            if (++expansions > 60) {
              raise(ErrorKind::BracketFailure, "could not bracket outlier for alpha " +
                                                   std::to_string(entry.alpha));
            }
            hi = report.band_edge + 2.0 * (hi - report.band_edge);
            g_hi = g(hi);
          }
          while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) >= target) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
          entry.z = 0.5 * (lo + hi);
        }
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

double detectability_threshold(const std::vector<std::pair<double, double>>& kappa_atoms,
                               const SolveOptions& opts) {
  // The band (hence g_max) is independent of theta for this family, so the
  // model is built at theta = 0; n only sets two_m, not the band.
  const ModelSpec model = build_two_community_model(kappa_atoms, 0.0, 10000);
  const Band band = find_band_edges(model, std::nullopt, {}, opts);
  const double gmax = g_max_at_edge(model, band, opts);
  return std::sqrt(model.c / gmax);
}

std::vector<Transition> transition_sequence(const std::function<ModelSpec(double)>& family,
                                            const std::vector<double>& sweep,
                                            const SolveOptions& opts) {
  if (sweep.size() < 2) raise(ErrorKind::BadInput, "sweep needs at least two values");

  // Signed distance to the visibility boundary for each r: f_r(s) < 0 means
  // outlier r is visible at strength s.
  auto gap = [&](double s) {
    const ModelSpec model = family(s);
    const Band band = find_band_edges(model, std::nullopt, {}, opts);
    const double gmax = g_max_at_edge(model, band, opts);
    const Eigen::VectorXd alphas = rank_structure(model).alphas;
    std::vector<double> f(alphas.size());
    for (int r = 0; r < alphas.size(); ++r) {
      f[r] = alphas(r) > 0.0 ? 1.0 / alphas(r) - gmax
                             : std::numeric_limits<double>::infinity();
    }
    return f;
  };

  std::vector<std::vector<double>> values(sweep.size());
  for (std::size_t i = 0; i < sweep.size(); ++i) values[i] = gap(sweep[i]);

  const std::size_t q = values.front().size();
  std::vector<Transition> transitions;
  for (std::size_t r = 1; r < q; ++r) {
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
      const double fa = values[i][r];
      const double fb = values[i + 1][r];
      if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
      if ((fa <= 0.0) == (fb <= 0.0)) continue;
      double lo = sweep[i], hi = sweep[i + 1];
      double flo = fa;
      const double tol = 1e-6 * std::abs(sweep.back() - sweep.front());
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = gap(mid)[r];
        if ((fm <= 0.0) == (flo <= 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      transitions.push_back({static_cast<int>(r + 1), 0.5 * (lo + hi)});
      break;
    }
  }
  // Disappearance order as structure weakens: smallest alpha (largest r)
  // meets the edge first, i.e. at the largest strength.
  std::sort(transitions.begin(), transitions.end(), [](const auto& a, const auto& b) {
    if (a.strength != b.strength) return a.strength > b.strength;
    return a.r > b.r;
  });
  return transitions;
}

}  // namespace graphspec
