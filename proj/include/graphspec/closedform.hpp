#pragma once

#include <array>
#include <complex>

namespace graphspec {

/// Constants of the kappa, 2*kappa two-value family. x is the sole real root
/// of 27x^3 - 216x^2 + 252x - 512; y is the smallest real root of
/// 2y^3 - 3*sqrt(x)*y^2 + (x + 4/3)*y - sqrt(x), which is a double root by
/// construction (the band edge is where two branches of h merge).
struct ThresholdConstants {
  double x;
  double y;
  double coefficient;  // theta* / kappa^(3/4)
};

ThresholdConstants threshold_constants();

/// Band density of the constant-degree model: sqrt(4c - x^2) / (2 pi c)
/// inside |x| <= 2 sqrt(c), zero outside.
double semicircle_density(double x, double c);

/// Decaying branch of h for the single-value model: the root of
/// c h^2 - z h + 1 = 0 that behaves as 1/z at infinity (negative imaginary
/// part in the upper half-plane, giving a nonnegative density).
std::complex<double> quadratic_h(std::complex<double> z, double c);

struct CubicRoots {
  std::array<std::complex<double>, 3> roots;
  int physical_index;  // root continuous with 1/z from large |z|
};

/// All roots of k1 k2 h^3 - (k1+k2) z h^2 + (2 k1 k2/(k1+k2) + z^2) h - z = 0
/// via the companion matrix, plus the physical-branch selector (homotopy
/// continuation from large |z|).
CubicRoots cubic_h_roots(std::complex<double> z, double kappa1, double kappa2);
std::complex<double> cubic_h_physical(std::complex<double> z, double kappa1, double kappa2);

/// Band density for the two-value model at real x, from the physical cubic
/// root in the zero-broadening limit.
double two_value_density(double x, double kappa1, double kappa2);

/// Outer band edge sqrt(x * kappa) for the kappa, 2*kappa family.
double band_edge_two_value(double kappa);

/// Detectability threshold theta* for the kappa, 2*kappa family.
double threshold_two_value(double kappa);

}  // namespace graphspec
