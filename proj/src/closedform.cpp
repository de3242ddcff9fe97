#include "graphspec/closedform.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "graphspec/errors.hpp"

namespace graphspec {

namespace {

using Complex = std::complex<double>;

double cubic_27(double x) { return ((27.0 * x - 216.0) * x + 252.0) * x - 512.0; }

/// Roots of a monic complex cubic h^3 + c2 h^2 + c1 h + c0 via the companion
/// matrix, each polished with two Newton steps.
std::array<Complex, 3> monic_cubic_roots(Complex c2, Complex c1, Complex c0) {
  Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -c0;
  companion(1, 2) = -c1;
  companion(2, 2) = -c2;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(companion, false);
  std::array<Complex, 3> roots;
  for (int i = 0; i < 3; ++i) {
    Complex r = solver.eigenvalues()(i);
    for (int step = 0; step < 2; ++step) {
      const Complex p = ((r + c2) * r + c1) * r + c0;
      const Complex dp = (3.0 * r + 2.0 * c2) * r + c1;
      if (std::abs(dp) > 0.0) r -= p / dp;
    }
    roots[i] = r;
  }
  return roots;
}

std::array<Complex, 3> h_cubic_roots_at(Complex z, double k1, double k2) {
  const Complex c2 = -(k1 + k2) * z / (k1 * k2);
  const Complex c1 = 2.0 / (k1 + k2) + z * z / (k1 * k2);
  const Complex c0 = -z / (k1 * k2);
  return monic_cubic_roots(c2, c1, c0);
}

int nearest_root(const std::array<Complex, 3>& roots, Complex target) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double d = std::abs(roots[i] - target);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

ThresholdConstants threshold_constants() {
  // Sole real root of 27x^3 - 216x^2 + 252x - 512, bracketed in [7, 7.1].
  double lo = 7.0, hi = 7.1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cubic_27(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-16) break;
  }
  const double x = 0.5 * (lo + hi);
  // y is the double root of 2y^3 - 3 sqrt(x) y^2 + (x + 4/3) y - sqrt(x),
  // so it is computed as the smaller critical point of that cubic. The
  // companion route would split the double root by ~sqrt(eps).
  const double sx = std::sqrt(x);
  const double y = (6.0 * sx - std::sqrt(12.0 * x - 32.0)) / 12.0;
  const double coefficient = std::sqrt(3.0 * sx / (2.0 + 3.0 * y * y));
  return {x, y, coefficient};
}

double semicircle_density(double x, double c) {
  if (!(c > 0.0)) raise(ErrorKind::BadInput, "c must be positive");
  const double support = 4.0 * c - x * x;
  if (support <= 0.0) return 0.0;
  return std::sqrt(support) / (2.0 * M_PI * c);
}

std::complex<double> quadratic_h(std::complex<double> z, double c) {
  if (!(c > 0.0)) raise(ErrorKind::BadInput, "c must be positive");
  const Complex s = std::sqrt(z * z - 4.0 * c);
  // Evaluate the numerically stable root first, recover the other from the
  // product h+ h- = 1/c.
  const Complex big = (std::norm(z + s) >= std::norm(z - s)) ? (z + s) / (2.0 * c)
                                                             : (z - s) / (2.0 * c);
  const Complex small = 1.0 / (c * big);
  if (z.imag() > 0.0) {
    // Physical branch has strictly negative imaginary part off the real axis.
    return small.imag() <= 0.0 ? small : big;
  }
  if (z.imag() < 0.0) {
    return std::conj(quadratic_h(std::conj(z), c));
  }
  // Real z: outside the band both roots are real and the physical one is the
  // smaller in magnitude; inside, take the limit from above (Im h <= 0).
  if (std::abs(small) < std::abs(big) - 1e-14 * std::abs(big)) return small;
  return small.imag() <= 0.0 ? small : big;
}

CubicRoots cubic_h_roots(std::complex<double> z, double kappa1, double kappa2) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) raise(ErrorKind::BadInput, "kappas must be positive");
  if (z.imag() < 0.0) {
    CubicRoots conj = cubic_h_roots(std::conj(z), kappa1, kappa2);
    for (auto& r : conj.roots) r = std::conj(r);
    return conj;
  }
  CubicRoots result;
  result.roots = h_cubic_roots_at(z, kappa1, kappa2);

  // Track the 1/z branch from far away down to z. The start sits at
  // magnitude ~1e6 off the positive diagonal so the path stays clear of the
  // branch points where roots collide.
  const Complex z0 = 1e6 * Complex(M_SQRT1_2, M_SQRT1_2);
  const Complex delta = z0 - z;
  const double dist = std::abs(delta);
  Complex h = 1.0 / z0;
  if (dist > 0.0) {
    const double d_min = 1e-8 * (1.0 + std::abs(z));
    const double ratio = std::pow(d_min / dist, 1.0 / 64.0);
    double scale = 1.0;
    for (int step = 0; step < 64; ++step) {
      scale *= ratio;
      const Complex zs = z + scale * delta;
      const auto roots = h_cubic_roots_at(zs, kappa1, kappa2);
      h = roots[nearest_root(roots, h)];
    }
  }
  result.physical_index = nearest_root(result.roots, h);

  if (z.imag() > 1e-12 && result.roots[result.physical_index].imag() > 1e-9) {
    // Mistracked through a near-collision; fall back to the admissible root
    // closest to the continuation.
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (result.roots[i].imag() > 1e-9) continue;
      const double d = std::abs(result.roots[i] - h);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    if (best < 0) raise(ErrorKind::NonPhysicalBranch, "no root with nonpositive imaginary part");
    result.physical_index = best;
  }
  return result;
}

std::complex<double> cubic_h_physical(std::complex<double> z, double kappa1, double kappa2) {
  const CubicRoots r = cubic_h_roots(z, kappa1, kappa2);
  return r.roots[r.physical_index];
}

double two_value_density(double x, double kappa1, double kappa2) {
  const double c = 0.5 * (kappa1 + kappa2);
  if (std::abs(x) < 1e-9 * std::sqrt(c)) {
    // rho(0) from the derivative of h^2 at the origin, where the direct
    // -(c/(pi x)) Im h^2 form is 0/0: h(0) = -i sqrt(2/(k1+k2)) and implicit
    // differentiation of the cubic gives h'(0) = (k1+k2)/(4 k1 k2).
    const double s = std::sqrt(2.0 / (kappa1 + kappa2));
    return c * s * (kappa1 + kappa2) / (2.0 * M_PI * kappa1 * kappa2);
  }
  const Complex h = cubic_h_physical(Complex(x, 0.0), kappa1, kappa2);
  const double im = (h * h).imag();
  // Outside the band the roots are real up to eigensolver dust.
  if (std::abs(im) < 1e-25) return 0.0;
  const double rho = -(c / (M_PI * x)) * im;
  return std::max(rho, 0.0);
}

double band_edge_two_value(double kappa) {
  if (!(kappa > 0.0)) raise(ErrorKind::BadInput, "kappa must be positive");
  return std::sqrt(threshold_constants().x * kappa);
}

double threshold_two_value(double kappa) {
  if (!(kappa > 0.0)) raise(ErrorKind::BadInput, "kappa must be positive");
  return threshold_constants().coefficient * std::pow(kappa, 0.75);
}

}  // namespace graphspec
