#include "mlab/function_spaces.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mlab {

void NormParams::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("NormParams: p must be >= 1");
  if (!(s >= 0.0)) throw std::invalid_argument("NormParams: s must be >= 0");
}

double NormParams::conjugate(double p) {
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return f.max_abs();
  const double sum = f.samples.cwiseAbs().array().pow(p).sum();
  return std::pow(f.grid.cell_volume() * sum, 1.0 / p);
}

namespace {

Field scaled_by_bessel(const Field& f, double s, double freq_scale) {
  if (!(s >= 0.0)) throw std::invalid_argument("bessel_potential: s must be >= 0");
  if (s == 0.0) return f;
  auto spec = dft_forward(f);
  const GridSpec& g = f.grid;
  const double k = g.wavenumber() * freq_scale;
  std::vector<int> xi(static_cast<std::size_t>(g.d));
  for (std::size_t i = 0; i < g.size(); ++i) {
    frequency_at(i, g, xi);
    double r2 = 0.0;
    for (int c : xi) r2 += (k * c) * (k * c);
    spec.coeffs[static_cast<Eigen::Index>(i)] *= std::pow(1.0 + r2, 0.5 * s);
  }
  auto out = dft_inverse(spec);
  out.real = f.real;
  return out;
}

}  // namespace

Field bessel_potential(const Field& f, double s) { return scaled_by_bessel(f, s, 1.0); }

double bessel_norm(const Field& f, double p, double s) { return lp_norm(bessel_potential(f, s), p); }

double bessel_norm_dilated(const Field& f, double p, double s, int t) {
  if (t < 0) throw std::invalid_argument("bessel_norm_dilated: t must be >= 0");
  return lp_norm(scaled_by_bessel(f, s, std::ldexp(1.0, t)), p);
}

double sobolev_wkp_norm(const Field& f, int k, double p) {
  if (k < 0) throw std::invalid_argument("sobolev_wkp_norm: k must be >= 0");
  const int d = f.grid.d;
  double total = 0.0;
  // Each multi-index counts once, so enumerate exponent vectors.
  std::vector<int> alpha(static_cast<std::size_t>(d), 0);
  while (true) {
    int order = 0;
    for (int a : alpha) order += a;
    if (order <= k) {
      Field g = f;
      for (int a = 0; a < d; ++a)
        for (int r = 0; r < alpha[static_cast<std::size_t>(a)]; ++r) g = spectral_derivative(g, a);
      total += lp_norm(g, p);
    }
    int a = d - 1;
    while (a >= 0 && ++alpha[static_cast<std::size_t>(a)] > k) {
      alpha[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return total;
}

double grad_sup_norms(const Field& f, int order) {
  const int d = f.grid.d;
  if (order == 1) {
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(f.samples.size());
    for (int a = 0; a < d; ++a) sq += spectral_derivative(f, a).samples.cwiseAbs2();
    return std::sqrt(sq.maxCoeff());
  }
  if (order == 2) {
    double best = 0.0;
    for (int a = 0; a < d; ++a) {
      const Field da = spectral_derivative(f, a);
      for (int b = a; b < d; ++b) best = std::max(best, spectral_derivative(da, b).max_abs());
    }
    return best;
  }
  throw std::invalid_argument("grad_sup_norms: order must be 1 or 2");
}

}  // namespace mlab
