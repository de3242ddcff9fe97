#include "graphspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace graphspec {

namespace {

void validate_atoms(const std::vector<ParamAtom>& atoms) {
  if (atoms.empty()) raise(ErrorKind::InvalidAtom, "model needs at least one atom");
  const auto q = atoms.front().k.size();
  if (q < 1) raise(ErrorKind::InvalidAtom, "atom vectors must have at least one component");
  double weight_sum = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (atoms[a].k.size() != q) {
      raise(ErrorKind::InvalidAtom, "atom " + std::to_string(a) + " has mismatched dimension");
    }
    if (!(atoms[a].weight > 0.0)) {
      raise(ErrorKind::WeightSum, "atom " + std::to_string(a) + " has nonpositive weight");
    }
    weight_sum += atoms[a].weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    raise(ErrorKind::WeightSum,
          "atom weights sum to " + std::to_string(weight_sum) + ", expected 1");
  }
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    for (std::size_t b = a; b < atoms.size(); ++b) {
      const double dot = atoms[a].k.dot(atoms[b].k);
      const double scale = atoms[a].k.norm() * atoms[b].k.norm();
      if (dot < -1e-12 * std::max(1.0, scale)) {
        raise(ErrorKind::NegativeProduct, "atoms " + std::to_string(a) + " and " +
                                              std::to_string(b) + " have dot product " +
                                              std::to_string(dot));
      }
    }
  }
}

}  // namespace

Eigen::VectorXd ModelSpec::mean_vector() const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(q);
  for (const auto& atom : atoms) mean += atom.weight * atom.k;
  return mean;
}

std::vector<std::int64_t> ModelSpec::atom_counts() const {
  std::vector<std::int64_t> counts(atoms.size());
  std::vector<std::pair<double, std::size_t>> remainders(atoms.size());
  std::int64_t assigned = 0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const double exact = atoms[a].weight * static_cast<double>(n);
    counts[a] = static_cast<std::int64_t>(std::floor(exact));
    assigned += counts[a];
    remainders[a] = {exact - std::floor(exact), a};
  }
  // Largest remainder first; ties resolved by atom index for determinism.
  std::sort(remainders.begin(), remainders.end(), [](const auto& lhs, const auto& rhs) {
    if (lhs.first != rhs.first) return lhs.first > rhs.first;
    return lhs.second < rhs.second;
  });
  std::int64_t leftover = n - assigned;
  for (std::size_t i = 0; leftover > 0; ++i, --leftover) {
    counts[remainders[i % remainders.size()].second] += 1;
  }
  return counts;
}

double ModelSpec::max_atom_norm() const {
  double m = 0.0;
  for (const auto& atom : atoms) m = std::max(m, atom.k.norm());
  return m;
}

ModelSpec build_model(std::vector<ParamAtom> atoms, std::int64_t n) {
  if (n < 1) raise(ErrorKind::BadInput, "n must be positive");
  validate_atoms(atoms);
  ModelSpec model;
  model.n = n;
  model.q = static_cast<int>(atoms.front().k.size());
  model.atoms = std::move(atoms);
  const double mean_norm = model.mean_vector().norm();
  model.two_m = static_cast<double>(n) * mean_norm;
  model.c = mean_norm;
  if (!(model.c > 0.0)) raise(ErrorKind::ZeroDegree, "model has zero average degree");
  return model;
}

ModelSpec build_two_community_model(const std::vector<std::pair<double, double>>& kappa_atoms,
                                    double theta, std::int64_t n) {
  if (kappa_atoms.empty()) raise(ErrorKind::InvalidAtom, "need at least one kappa atom");
  if (theta < 0.0) raise(ErrorKind::BadInput, "theta must be nonnegative");
  std::vector<ParamAtom> atoms;
  atoms.reserve(2 * kappa_atoms.size());
  for (const auto& [kappa, weight] : kappa_atoms) {
    if (!(kappa > 0.0)) raise(ErrorKind::InvalidAtom, "kappa values must be positive");
    if (kappa < theta) {
      raise(ErrorKind::ThetaTooLarge, "kappa " + std::to_string(kappa) +
                                          " is smaller than theta " + std::to_string(theta));
    }
    Eigen::VectorXd plus(2), minus(2);
    plus << kappa, theta;
    minus << kappa, -theta;
    atoms.push_back({plus, weight / 2.0});
    atoms.push_back({minus, weight / 2.0});
  }
  ModelSpec model = build_model(std::move(atoms), n);
  model.two_community = TwoCommunityInfo{kappa_atoms, theta};
  return model;
}

std::vector<Eigen::VectorXd> simplex_directions(int q, double phi) {
  if (q < 1) raise(ErrorKind::BadInput, "q must be positive");
  const double cphi = std::cos(phi);
  if (cphi < -1e-15 || phi < 0.0 || phi > M_PI / 2.0 + 1e-15) {
    raise(ErrorKind::BadAngle, "need 0 <= phi <= pi/2 so all products stay nonnegative");
  }
  std::vector<Eigen::VectorXd> dirs(q);
  if (q == 1) {
    dirs[0] = Eigen::VectorXd::Ones(1);
    return dirs;
  }
  // v_r = a e_r + b u with u = (1,...,1)/sqrt(q); a, b chosen so that
  // v_r . v_s = delta_rs + (1 - delta_rs) cos(phi).
  const double a = std::sqrt(std::max(0.0, 1.0 - cphi));
  const double b = -a / std::sqrt(double(q)) +
                   std::sqrt(std::max(0.0, a * a / double(q) + cphi));
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(q, 1.0 / std::sqrt(double(q)));
  for (int r = 0; r < q; ++r) {
    Eigen::VectorXd v = b * u;
    v(r) += a;
    dirs[r] = v;
  }
  return dirs;
}

ModelSpec build_simplex_model(int q, double phi,
                              const std::vector<std::pair<double, double>>& magnitude_atoms,
                              std::int64_t n) {
  if (magnitude_atoms.empty()) raise(ErrorKind::InvalidAtom, "need at least one magnitude atom");
  const auto dirs = simplex_directions(q, phi);
  std::vector<ParamAtom> atoms;
  atoms.reserve(magnitude_atoms.size() * static_cast<std::size_t>(q));
  for (const auto& [magnitude, weight] : magnitude_atoms) {
    if (!(magnitude > 0.0)) raise(ErrorKind::InvalidAtom, "magnitudes must be positive");
    // Direction index innermost, so community = atom index mod q.
    for (int r = 0; r < q; ++r) {
      atoms.push_back({magnitude * dirs[r], weight / double(q)});
    }
  }
  return build_model(std::move(atoms), n);
}

RankQStructure rank_structure(const ModelSpec& model) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(model.q, model.q);
  for (const auto& atom : model.atoms) {
    gram.noalias() += (atom.weight / model.c) * atom.k * atom.k.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  Eigen::VectorXd alphas = solver.eigenvalues().reverse();
  return {alphas, gram};
}

Eigen::MatrixXd mean_adjacency(const ModelSpec& model) {
  const auto counts = model.atom_counts();
  Eigen::MatrixXd k_rows(model.n, model.q);
  std::int64_t row = 0;
  for (std::size_t a = 0; a < model.atoms.size(); ++a) {
    for (std::int64_t i = 0; i < counts[a]; ++i) k_rows.row(row++) = model.atoms[a].k;
  }
  return k_rows * k_rows.transpose() / model.two_m;
}

}  // namespace graphspec
