#include "graphspec/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "graphspec/util.hpp"

namespace graphspec {

namespace {

using Complex = std::complex<double>;

/// Atom data packed for repeated evaluation of the fixed-point map.
struct FixedPointMap {
  explicit FixedPointMap(const ModelSpec& model)
      : kmat(model.atoms.size(), model.q),
        weights(model.atoms.size()),
        c(model.c) {
    for (std::size_t a = 0; a < model.atoms.size(); ++a) {
      kmat.row(static_cast<Eigen::Index>(a)) = model.atoms[a].k;
      weights(static_cast<Eigen::Index>(a)) = model.atoms[a].weight;
    }
    kmat_c = kmat.cast<Complex>();
  }

  Eigen::VectorXcd denominators(Complex z, const Eigen::VectorXcd& h) const {
    return (-(kmat_c * h).array() + z).matrix();
  }

  Eigen::VectorXcd apply(Complex z, const Eigen::VectorXcd& h) const {
    const Eigen::ArrayXcd denom = denominators(z, h).array();
    const Eigen::ArrayXcd coeff = weights.array().cast<Complex>() / denom;
    return kmat_c.transpose() * coeff.matrix() / c;
  }

  Eigen::MatrixXcd jacobian(Complex z, const Eigen::VectorXcd& h) const {
    const Eigen::ArrayXcd denom = denominators(z, h).array();
    const Eigen::ArrayXcd coeff = weights.array().cast<Complex>() / (denom * denom);
    return kmat_c.transpose() * coeff.matrix().asDiagonal() * kmat_c / c;
  }

  Eigen::MatrixXd kmat;
  Eigen::MatrixXcd kmat_c;
  Eigen::VectorXd weights;
  double c;
};

double defect_norm(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

Complex g_from_h(Complex z, const Eigen::VectorXcd& h, double c) {
  const Complex hh = (h.array() * h.array()).sum();
  return (1.0 + c * hh) / z;
}

}  // namespace

HSolution solve_h(std::complex<double> z, const ModelSpec& model,
                  const Eigen::VectorXcd* warm_start, const SolveOptions& opts) {
  if (z.imag() < 0.0) raise(ErrorKind::BadInput, "solve_h requires Im z >= 0");
  const FixedPointMap map(model);

  Eigen::VectorXcd h = warm_start && warm_start->size() == model.q
                           ? *warm_start
                           : Eigen::VectorXcd(model.mean_vector().cast<Complex>() / (model.c * z));

  double damping = opts.damping;
  double defect = std::numeric_limits<double>::infinity();
  double prev_defect = defect;
  int rising = 0;
  int iterations = 0;
  int next_newton = opts.newton_after;

  Eigen::VectorXcd fh = map.apply(z, h);
  defect = defect_norm(fh, h);

  while (defect > opts.tol && iterations < opts.max_iter) {
    // Damped Picard step.
    h = (1.0 - damping) * h + damping * fh;
    fh = map.apply(z, h);
    prev_defect = defect;
    defect = defect_norm(fh, h);
    ++iterations;

    if (defect > prev_defect) {
      if (++rising >= 5) {
        damping = std::max(0.01, 0.5 * damping);
        rising = 0;
      }
    } else {
      rising = 0;
    }

    // Near band edges the Picard map's contraction factor approaches 1, so
    // switch to Newton on h - F(h) = 0 once plain iteration stalls.
    if (defect > opts.tol && iterations >= next_newton) {
      next_newton = iterations + opts.newton_after;
      Eigen::VectorXcd hn = h;
      double dn = defect;
      const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(model.q, model.q);
      for (int step = 0; step < 80 && dn > opts.tol; ++step) {
        const Eigen::MatrixXcd jac = map.jacobian(z, hn);
        const Eigen::VectorXcd residual = map.apply(z, hn) - hn;
        Eigen::VectorXcd delta = (identity - jac).partialPivLu().solve(residual);
        double scale = 1.0;
        Eigen::VectorXcd candidate = hn + delta;
        double dc = defect_norm(map.apply(z, candidate), candidate);
        for (int backtrack = 0; backtrack < 6 && dc > dn; ++backtrack) {
          scale *= 0.5;
          candidate = hn + scale * delta;
          dc = defect_norm(map.apply(z, candidate), candidate);
        }
        if (dc >= dn && step > 4) break;
        hn = candidate;
        dn = dc;
        ++iterations;
      }
      if (dn < defect) {
        h = hn;
        fh = map.apply(z, h);
        defect = defect_norm(fh, h);
      }
    }
  }

  if (defect > opts.tol) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "fixed point stalled at defect %.3e after %d iterations at z = (%.9g, %.3g)",
                  defect, iterations, z.real(), z.imag());
    raise(ErrorKind::NoConvergence, msg);
  }

  HSolution solution{z, h, defect, iterations};
  if (z.imag() > 0.0) {
    const Complex g = g_from_h(z, h, model.c);
    if (g.imag() > 1e-9) {
      raise(ErrorKind::NonPhysicalBranch,
            "converged branch has Im g = " + std::to_string(g.imag()));
    }
  }
  return solution;
}

std::complex<double> stieltjes_g(const HSolution& solution, const ModelSpec& model) {
  return g_from_h(solution.z, solution.h, model.c);
}

std::complex<double> stieltjes_g_direct(const HSolution& solution, const ModelSpec& model) {
  Complex total = 0.0;
  for (const auto& atom : model.atoms) {
    const Complex dot = (atom.k.cast<Complex>().array() * solution.h.array()).sum();
    total += atom.weight / (solution.z - dot);
  }
  return total;
}

double density_at(double x, const ModelSpec& model, double epsilon,
                  const Eigen::VectorXcd* warm_start, const SolveOptions& opts) {
  if (!(epsilon > 0.0)) raise(ErrorKind::BadInput, "epsilon must be positive");
  const HSolution sol = solve_h(Complex(x, epsilon), model, warm_start, opts);
  const double rho = -stieltjes_g(sol, model).imag() / M_PI;
  return std::max(rho, 0.0);
}

double density_from_h_norm(double x, const ModelSpec& model, double epsilon,
                           const SolveOptions& opts) {
  if (std::abs(x) < 1e-300) raise(ErrorKind::BadInput, "h-norm density form is singular at x = 0");
  const HSolution sol = solve_h(Complex(x, epsilon), model, nullptr, opts);
  const Complex hh = (sol.h.array() * sol.h.array()).sum();
  return -(model.c / (M_PI * x)) * hh.imag();
}

DensityCurve density_curve(const ModelSpec& model, const DensityGrid& grid, double epsilon,
                           int threads, const SolveOptions& opts) {
  if (!(grid.lo < grid.hi) || grid.points < 2) {
    raise(ErrorKind::BadInput, "density grid needs lo < hi and at least 2 points");
  }
  if (!(epsilon > 0.0)) raise(ErrorKind::BadInput, "epsilon must be positive");

  const int points = grid.points;
  const double step = (grid.hi - grid.lo) / (points - 1);
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = grid.lo + i * step;

  // Coarse continuation pass: descend into the band from both ends so every
  // fine point has a nearby converged branch to start from.
  const int coarse_n = std::clamp(points / 8, 17, 129);
  std::vector<double> coarse_xs(coarse_n);
  std::vector<Eigen::VectorXcd> coarse_h(coarse_n);
  std::vector<bool> coarse_ok(coarse_n, false);
  const double cstep = (grid.hi - grid.lo) / (coarse_n - 1);
  for (int i = 0; i < coarse_n; ++i) coarse_xs[i] = grid.lo + i * cstep;

  auto coarse_sweep = [&](int begin, int end, int inc) {
    const Eigen::VectorXcd* warm = nullptr;
    Eigen::VectorXcd last;
    for (int i = begin; i != end; i += inc) {
      try {
        const HSolution sol = solve_h(Complex(coarse_xs[i], epsilon), model, warm, opts);
        coarse_h[i] = sol.h;
        coarse_ok[i] = true;
        last = sol.h;
        warm = &last;
      } catch (const Error&) {
        warm = nullptr;
      }
    }
  };
  coarse_sweep(coarse_n - 1, coarse_n / 2 - 1, -1);
  coarse_sweep(0, coarse_n / 2 + 1, 1);

  DensityCurve curve;
  curve.xs = xs;
  curve.epsilon = epsilon;
  curve.rho.assign(points, 0.0);
  std::vector<char> failed(points, 0);

  parallel_for(static_cast<std::size_t>(points), threads, [&](std::size_t idx) {
    const double x = xs[idx];
    int nearest = std::clamp(static_cast<int>(std::lround((x - grid.lo) / cstep)), 0, coarse_n - 1);
    const Eigen::VectorXcd* warm = nullptr;
    for (int delta = 0; delta < coarse_n; ++delta) {
      const int lo = nearest - delta, hi = nearest + delta;
      if (lo >= 0 && coarse_ok[lo]) {
        warm = &coarse_h[lo];
        break;
      }
      if (hi < coarse_n && coarse_ok[hi]) {
        warm = &coarse_h[hi];
        break;
      }
    }
    SolveOptions local = opts;
    for (int attempt = 0; attempt < 3; ++attempt) {
      try {
        curve.rho[idx] = density_at(x, model, epsilon, warm, local);
        return;
      } catch (const Error&) {
        local.damping *= 0.5;
        warm = nullptr;
      }
    }
    failed[idx] = 1;
  });

  for (int i = 0; i < points; ++i) {
    if (failed[i]) curve.failed.push_back(i);
  }
  if (curve.failed.size() * 100 > static_cast<std::size_t>(points)) {
    raise(ErrorKind::NoConvergence, std::to_string(curve.failed.size()) + " of " +
                                        std::to_string(points) +
                                        " grid points failed to converge");
  }
  return curve;
}

double Band::lower_edge() const {
  if (intervals.empty()) raise(ErrorKind::EmptyBand, "band has no intervals");
  return intervals.front().first;
}

double Band::upper_edge() const {
  if (intervals.empty()) raise(ErrorKind::EmptyBand, "band has no intervals");
  return intervals.back().second;
}

double Band::width() const { return upper_edge() - lower_edge(); }

std::vector<double> default_epsilon_sequence(const ModelSpec& model) {
  const double scale = std::sqrt(model.c);
  // The final rung keeps the apparent edge shift well below the 1e-3 sqrt(c)
  // accuracy target; see the g_max extrapolation which needs edge error small
  // against its delta ladder.
  return {1e-2 * scale, 1e-3 * scale, 1e-4 * scale, 1e-5 * scale, 1e-6 * scale};
}

Band find_band_edges(const ModelSpec& model, std::optional<std::pair<double, double>> search,
                     std::vector<double> epsilon_sequence, const SolveOptions& opts) {
  if (epsilon_sequence.empty()) epsilon_sequence = default_epsilon_sequence(model);
  std::sort(epsilon_sequence.rbegin(), epsilon_sequence.rend());

  const double default_half = 2.0 * model.max_atom_norm() + 4.0 * std::sqrt(model.c);
  double lo = search ? search->first : -default_half;
  double hi = search ? search->second : default_half;

  const double eps0 = epsilon_sequence.front();
  // Bisection resolution well below the g_max delta ladder (1e-4 sqrt(c)),
  // so an edge estimate never lands inside the true band at that scale.
  const double edge_tol = 1e-5 * std::sqrt(model.c);
  const double merge_window = 1e-3 * std::sqrt(model.c);

  for (int widen = 0; widen < 4; ++widen) {
    const int coarse_n = 513;
    const DensityCurve coarse = density_curve(model, {lo, hi, coarse_n}, eps0, 0, opts);
    const double rho_max = *std::max_element(coarse.rho.begin(), coarse.rho.end());
    if (!(rho_max > 0.0)) raise(ErrorKind::EmptyBand, "no spectral density found in search range");
    const double rho_cut = 1e-3 * rho_max;

    std::vector<char> inside(coarse_n);
    for (int i = 0; i < coarse_n; ++i) inside[i] = coarse.rho[i] > rho_cut;
    if (inside.front() || inside.back()) {
      // Band touches the search boundary; widen and retry.
      const double half = (hi - lo);
      lo -= half / 2.0;
      hi += half / 2.0;
      continue;
    }

    auto indicator = [&](double x, double eps) {
      SolveOptions local = opts;
      for (int attempt = 0; attempt < 3; ++attempt) {
        try {
          return density_at(x, model, eps, nullptr, local) > rho_cut;
        } catch (const Error&) {
          local.damping *= 0.5;
        }
      }
      return density_at(x, model, eps, nullptr, local) > rho_cut;
    };

    // Refine one edge: bracket [a, b] with indicator(a) != indicator(b).
    auto bisect_edge = [&](double a, double b, double eps) {
      bool ia = indicator(a, eps);
      while (b - a > edge_tol) {
        const double mid = 0.5 * (a + b);
        if (indicator(mid, eps) == ia) {
          a = mid;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    };

    std::vector<double> edges;
    for (int i = 0; i + 1 < coarse_n; ++i) {
      if (inside[i] != inside[i + 1]) {
        edges.push_back(bisect_edge(coarse.xs[i], coarse.xs[i + 1], eps0));
      }
    }
    if (edges.size() % 2 != 0) {
      raise(ErrorKind::EmptyBand, "unpaired band edge; search range may clip the band");
    }

    // Sharpen each edge across the broadening ladder. Smaller broadening can
    // only shrink the apparent support, so re-bracket around the previous
    // estimate with an expanding window.
    for (std::size_t k = 1; k < epsilon_sequence.size(); ++k) {
      const double eps = epsilon_sequence[k];
      for (double& edge : edges) {
        double pad = std::max(4.0 * edge_tol, merge_window);
        double a = edge - pad, b = edge + pad;
        int expand = 0;
        while (indicator(a, eps) == indicator(b, eps) && expand < 24) {
          pad *= 2.0;
          a = edge - pad;
          b = edge + pad;
          ++expand;
        }
        if (expand < 24) edge = bisect_edge(a, b, eps);
      }
    }

    Band band;
    for (std::size_t i = 0; i + 1 < edges.size(); i += 2) {
      band.intervals.emplace_back(edges[i], edges[i + 1]);
    }
    // Merge intervals the refinement brought within resolution of each other.
    std::vector<std::pair<double, double>> merged;
    for (const auto& interval : band.intervals) {
      if (!merged.empty() && interval.first - merged.back().second < merge_window) {
        merged.back().second = interval.second;
      } else {
        merged.push_back(interval);
      }
    }
    band.intervals = std::move(merged);
    for (std::size_t i = 0; i < band.intervals.size(); ++i) {
      if (!(band.intervals[i].first < band.intervals[i].second) ||
          (i > 0 && band.intervals[i].first <= band.intervals[i - 1].second)) {
        raise(ErrorKind::EmptyBand, "degenerate band intervals; solver misconfiguration");
      }
    }
    return band;
  }
  raise(ErrorKind::EmptyBand, "band search failed to bracket the spectrum");
}

}  // namespace graphspec
