#include "graphspec/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <string>

#include "graphspec/rng.hpp"

namespace graphspec {

namespace {

/// Compressed sparse row view of the symmetric adjacency matrix.
struct SparseAdjacency {
  explicit SparseAdjacency(const SampledGraph& graph) : n(graph.n) {
    std::vector<std::int64_t> counts(n, 0);
    for (const auto& e : graph.edges) {
      ++counts[e.i];
      ++counts[e.j];
    }
    offsets.assign(n + 1, 0);
    for (std::int64_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + counts[v];
    cols.resize(offsets[n]);
    vals.resize(offsets[n]);
    std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : graph.edges) {
      cols[cursor[e.i]] = e.j;
      vals[cursor[e.i]++] = static_cast<double>(e.multiplicity);
      cols[cursor[e.j]] = e.i;
      vals[cursor[e.j]++] = static_cast<double>(e.multiplicity);
    }
  }

  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero();
    for (std::int64_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::int64_t idx = offsets[v]; idx < offsets[v + 1]; ++idx) {
        acc += vals[idx] * x[cols[idx]];
      }
      y[v] = acc;
    }
  }

  std::int64_t n;
  std::vector<std::int64_t> offsets;
  std::vector<std::int64_t> cols;
  std::vector<double> vals;
};

std::vector<int> best_permutation_accuracy(const std::vector<int>& assignment,
                                           const std::vector<int>& planted, int q,
                                           double* accuracy) {
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  std::int64_t best_matches = -1;
  do {
    std::int64_t matches = 0;
    for (std::size_t v = 0; v < assignment.size(); ++v) {
      if (perm[assignment[v]] == planted[v]) ++matches;
    }
    if (matches > best_matches) {
      best_matches = matches;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  *accuracy = static_cast<double>(best_matches) / static_cast<double>(assignment.size());
  std::vector<int> relabeled(assignment.size());
  for (std::size_t v = 0; v < assignment.size(); ++v) relabeled[v] = best_perm[assignment[v]];
  return relabeled;
}

std::vector<int> kmeans_rows(const Eigen::MatrixXd& rows, int q, std::uint64_t seed) {
  const std::int64_t n = rows.rows();
  const int dim = static_cast<int>(rows.cols());
  Rng rng(mix64(seed ^ 0x6b79u));
  Eigen::MatrixXd centers(q, dim);
  std::vector<int> assign(n, 0);
  std::vector<int> best_assign(n, 0);
  double best_score = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < 10; ++restart) {
    for (int c = 0; c < q; ++c) {
      centers.row(c) = rows.row(static_cast<std::int64_t>(rng.uniform_below(n)));
    }
    double score = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
      score = 0.0;
      for (std::int64_t v = 0; v < n; ++v) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < q; ++c) {
          const double d = (rows.row(v) - centers.row(c)).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        assign[v] = best;
        score += best_d;
      }
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(q, dim);
      std::vector<std::int64_t> counts(q, 0);
      for (std::int64_t v = 0; v < n; ++v) {
        sums.row(assign[v]) += rows.row(v);
        ++counts[assign[v]];
      }
      for (int c = 0; c < q; ++c) {
        if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      }
    }
    if (score < best_score) {
      best_score = score;
      best_assign = assign;
    }
  }
  return best_assign;
}

}  // namespace

Eigen::MatrixXd dense_adjacency(const SampledGraph& graph) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(graph.n, graph.n);
  for (const auto& e : graph.edges) {
    a(e.i, e.j) += static_cast<double>(e.multiplicity);
    a(e.j, e.i) += static_cast<double>(e.multiplicity);
  }
  return a;
}

EmpiricalSpectrum eigen_spectrum_full(const SampledGraph& graph, const EigenOptions& opts) {
  if (graph.n > opts.dense_limit) {
    raise(ErrorKind::BadInput, "full mode limited to n <= " + std::to_string(opts.dense_limit));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_adjacency(graph),
                                                        Eigen::EigenvaluesOnly);
  EmpiricalSpectrum spectrum;
  spectrum.full = true;
  spectrum.n = graph.n;
  spectrum.seed = graph.seed;
  const auto& vals = solver.eigenvalues();
  spectrum.eigenvalues.assign(vals.data(), vals.data() + vals.size());
  std::reverse(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());
  return spectrum;
}

LanczosResult lanczos_topk(const SampledGraph& graph, int k, const EigenOptions& opts) {
  const std::int64_t n = graph.n;
  if (k < 1 || k > n) raise(ErrorKind::BadInput, "top_k must be in [1, n]");
  const SparseAdjacency adj(graph);
  const int m_max = static_cast<int>(std::min<std::int64_t>(n, opts.lanczos_max_subspace));

  Eigen::MatrixXd basis(n, m_max);
  std::vector<double> alpha, beta;
  alpha.reserve(m_max);
  beta.reserve(m_max);

  Rng rng(mix64(graph.seed ^ 0x6c616e63u));
  Eigen::VectorXd v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = rng.next_double() - 0.5;
  v.normalize();
  basis.col(0) = v;

  Eigen::VectorXd w(n);
  double norm_estimate = 1.0;
  std::vector<double> ritz, residuals;
  int m = 0;

  auto check_converged = [&](int steps) {
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < steps) {
        tri(i, i + 1) = beta[i];
        tri(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
    ritz.clear();
    residuals.clear();
    norm_estimate = std::max(std::abs(small.eigenvalues()(0)),
                             std::abs(small.eigenvalues()(steps - 1)));
    const double tail =
        steps <= static_cast<int>(beta.size()) ? beta[steps - 1] : 0.0;
    bool done = true;
    for (int i = 0; i < std::min(k, steps); ++i) {
      const int col = steps - 1 - i;  // descending eigenvalue order
      ritz.push_back(small.eigenvalues()(col));
      const double res = std::abs(tail * small.eigenvectors()(steps - 1, col));
      residuals.push_back(res);
      if (res > opts.lanczos_tol * std::max(1.0, norm_estimate)) done = false;
    }
    return done && steps >= k;
  };

  bool converged = false;
  for (m = 0; m < m_max; ++m) {
    adj.multiply(basis.col(m), w);
    if (m > 0) w -= beta[m - 1] * basis.col(m - 1);
    alpha.push_back(basis.col(m).dot(w));
    w -= alpha[m] * basis.col(m);
    // Full reorthogonalization, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
    }
    double b = w.norm();
    if (b < 1e-13 * std::max(1.0, norm_estimate)) {
      // Invariant subspace: decouple the recurrence (beta = 0) and restart
      // with a fresh direction orthogonal to everything so far.
      for (std::int64_t i = 0; i < n; ++i) w[i] = rng.next_double() - 0.5;
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
      }
      const double wn = w.norm();
      if (wn < 1e-300) break;
      beta.push_back(0.0);
      if (m + 1 < m_max) basis.col(m + 1) = w / wn;
    } else {
      beta.push_back(b);
      if (m + 1 < m_max) basis.col(m + 1) = w / b;
    }
    if ((m + 1) % 25 == 0 || m + 1 == m_max) {
      if (check_converged(m + 1)) {
        converged = true;
        ++m;
        break;
      }
    }
  }

  const int steps = std::min(m, m_max);
  if (!converged && !check_converged(steps)) {
    std::string msg = "lanczos residuals after " + std::to_string(steps) + " steps:";
    for (double r : residuals) msg += " " + std::to_string(r);
    raise(ErrorKind::IterativeNoConvergence, msg);
  }

  // Recompute the subspace eigenvectors once more for the Ritz vectors.
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
  for (int i = 0; i < steps; ++i) {
    tri(i, i) = alpha[i];
    if (i + 1 < steps) {
      tri(i, i + 1) = beta[i];
      tri(i + 1, i) = beta[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
  LanczosResult result;
  result.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const int col = steps - 1 - i;
    result.values.push_back(small.eigenvalues()(col));
    result.vectors.col(i) = basis.leftCols(steps) * small.eigenvectors().col(col);
    result.vectors.col(i).normalize();
  }
  // Exact residuals for the returned pairs.
  for (int i = 0; i < k; ++i) {
    adj.multiply(result.vectors.col(i), w);
    result.residuals.push_back((w - result.values[i] * result.vectors.col(i)).norm());
  }
  return result;
}

EmpiricalSpectrum eigen_spectrum_topk(const SampledGraph& graph, int k,
                                      const EigenOptions& opts) {
  const LanczosResult lanczos = lanczos_topk(graph, k, opts);
  EmpiricalSpectrum spectrum;
  spectrum.full = false;
  spectrum.n = graph.n;
  spectrum.seed = graph.seed;
  spectrum.eigenvalues = lanczos.values;
  spectrum.residuals = lanczos.residuals;
  return spectrum;
}

Histogram spectral_histogram(const std::vector<double>& eigenvalues_desc, int bins,
                             int exclude_top) {
  if (bins < 1) raise(ErrorKind::BadInput, "bins must be positive");
  if (exclude_top < 0 ||
      static_cast<std::size_t>(exclude_top) >= eigenvalues_desc.size()) {
    raise(ErrorKind::BadInput, "exclude_top out of range");
  }
  const auto begin = eigenvalues_desc.begin() + exclude_top;
  const auto end = eigenvalues_desc.end();
  double lo = *std::min_element(begin, end);
  double hi = *std::max_element(begin, end);
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram hist;
  hist.included = std::distance(begin, end);
  const double width = (hi - lo) / bins;
  hist.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) hist.edges[b] = lo + b * width;
  hist.density.assign(bins, 0.0);
  for (auto it = begin; it != end; ++it) {
    int b = static_cast<int>((*it - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    hist.density[b] += 1.0;
  }
  for (double& d : hist.density) d /= static_cast<double>(hist.included) * width;
  return hist;
}

std::vector<int> planted_communities(const SampledGraph& graph, int q) {
  std::vector<int> planted(graph.labels.size());
  for (std::size_t v = 0; v < graph.labels.size(); ++v) planted[v] = graph.labels[v] % q;
  return planted;
}

RecoveryResult detect_communities(const SampledGraph& graph, int q,
                                  const std::vector<int>& planted, const EigenOptions& opts) {
  if (q < 2) raise(ErrorKind::BadInput, "q must be at least 2");
  if (planted.size() != static_cast<std::size_t>(graph.n)) {
    raise(ErrorKind::BadInput, "planted labels must cover all vertices");
  }
  RecoveryResult result;
  if (q == 2) {
    const LanczosResult lanczos = lanczos_topk(graph, 2, opts);
    result.assignment.resize(graph.n);
    for (std::int64_t v = 0; v < graph.n; ++v) {
      result.assignment[v] = lanczos.vectors(v, 1) > 0.0 ? 0 : 1;
    }
    std::int64_t matches = 0;
    for (std::int64_t v = 0; v < graph.n; ++v) {
      if (result.assignment[v] == planted[v]) ++matches;
    }
    const double frac = static_cast<double>(matches) / static_cast<double>(graph.n);
    if (frac < 0.5) {
      for (int& a : result.assignment) a = 1 - a;
      result.accuracy = 1.0 - frac;
    } else {
      result.accuracy = frac;
    }
    return result;
  }
  const LanczosResult lanczos = lanczos_topk(graph, q, opts);
  const std::vector<int> raw = kmeans_rows(lanczos.vectors, q, graph.seed);
  if (q <= 5) {
    result.assignment = best_permutation_accuracy(raw, planted, q, &result.accuracy);
  } else {
    result.assignment = raw;
    std::int64_t matches = 0;
    for (std::int64_t v = 0; v < graph.n; ++v) {
      if (raw[v] == planted[v]) ++matches;
    }
    result.accuracy = static_cast<double>(matches) / static_cast<double>(graph.n);
  }
  return result;
}

bool interlacing_check(std::int64_t n_small, const ModelSpec& model, double alpha,
                       std::uint64_t seed) {
  if (n_small > 1000) raise(ErrorKind::BadInput, "interlacing check is a small-n tool");
  ModelSpec small = model;
  small.n = n_small;
  small.two_m = small.c * static_cast<double>(n_small);
  const SampledGraph graph = sample_graph(small, seed);
  const Eigen::MatrixXd x = dense_adjacency(graph) - mean_adjacency(small);

  Rng rng(mix64(seed ^ 0x75766563u));
  Eigen::VectorXd u(n_small);
  for (std::int64_t i = 0; i < n_small; ++i) u[i] = rng.next_double() - 0.5;
  u.normalize();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> base(x, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bumped(x + alpha * u * u.transpose(),
                                                        Eigen::EigenvaluesOnly);
  // Ascending order from Eigen; interlacing for alpha > 0 is
  // z_1 >= lambda_1 >= z_2 >= ... with both sorted descending.
  const auto& lam = base.eigenvalues();
  const auto& z = bumped.eigenvalues();
  const double spread = std::max(1.0, lam(n_small - 1) - lam(0) + std::abs(alpha));
  const double tol = 1e-9 * spread;
  for (std::int64_t i = 0; i < n_small; ++i) {
    const double z_i = z(n_small - 1 - i);
    const double lam_i = lam(n_small - 1 - i);
    if (z_i < lam_i - tol) return false;
    if (i + 1 < n_small) {
      const double z_next = z(n_small - 2 - i);
      if (lam_i < z_next - tol) return false;
    }
  }
  return true;
}

}  // namespace graphspec
