#pragma once

// Discrete L^p, Bessel potential and Sobolev norms on the periodic grid.
// Frequencies enter in physical units k * xi, k = 2 pi / period.

#include "mlab/grid_spectral.hpp"

#include <limits>

namespace mlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct NormParams {
  double p = 2.0;
  double s = 0.0;

  void validate() const;
  /// p / (p - 1), infinity for p = 1.
  static double conjugate(double p);
};

/// ((period/n)^d sum |f|^p)^{1/p}; max |f| for p = infinity.
double lp_norm(const Field& f, double p);

/// Spectrum multiplied by (1 + |k xi|^2)^{s/2}.
Field bessel_potential(const Field& f, double s);
double bessel_norm(const Field& f, double p, double s);

/// Bessel norm of f(2^t x) computed on f's own grid: the torus L^p norm of
/// g(2^t x) equals that of g, so only the multiplier sees the dilation.
double bessel_norm_dilated(const Field& f, double p, double s, int t);

/// sum_{|alpha| <= k} lp_norm(d^alpha f, p)
double sobolev_wkp_norm(const Field& f, int k, double p);

/// order 1: max_x |grad f(x)| (Euclidean); order 2: max_x max_{a,b} |d_a d_b f(x)|.
double grad_sup_norms(const Field& f, int order);

}  // namespace mlab
