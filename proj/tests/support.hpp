#pragma once

// Independent oracles and input generators for the test suites. Nothing here
// calls the library's transforms or operators.

#include "mlab/grid_spectral.hpp"
#include "mlab/symbols.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace mlab::testing {

/// Real trigonometric polynomial with random coefficients on |xi|_inf <= radius
/// (no Nyquist modes, zero mean unless with_mean).
inline Field trig_field(std::mt19937_64& rng, const GridSpec& g, int radius, bool with_mean = false) {
  std::normal_distribution<double> N(0.0, 1.0);
  radius = std::min(radius, g.n / 2 - 1);
  std::vector<std::pair<std::vector<int>, cd>> modes;
  std::vector<int> xi(static_cast<std::size_t>(g.d), -radius);
  for (;;) {
    // Keep one representative of each +-xi pair.
    bool positive = false, zero = true;
    for (int c : xi) {
      if (c != 0) {
        positive = c > 0;
        zero = false;
        break;
      }
    }
    if (positive) modes.push_back({xi, cd(N(rng), N(rng))});
    if (zero && with_mean) modes.push_back({xi, cd(N(rng), 0.0)});
    int a = g.d - 1;
    while (a >= 0 && xi[static_cast<std::size_t>(a)] == radius) xi[static_cast<std::size_t>(a--)] = -radius;
    if (a < 0) break;
    ++xi[static_cast<std::size_t>(a)];
  }
  const double k = g.wavenumber();
  Field f = Field::sample(g, [&](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& [e, c] : modes) {
      double ph = 0.0;
      for (int a = 0; a < g.d; ++a) ph += k * e[static_cast<std::size_t>(a)] * x[a];
      bool is_zero = true;
      for (int q : e) is_zero = is_zero && q == 0;
      v += is_zero ? c.real() : 2.0 * (c * std::exp(cd(0.0, ph))).real();
    }
    return v;
  });
  f.real = true;
  return f;
}

/// Direct O(N^2) DFT with the library's normalization.
inline std::vector<cd> naive_dft(const Field& f) {
  const GridSpec& g = f.grid;
  const std::size_t N = g.size();
  std::vector<cd> out(N);
  std::vector<int> p(static_cast<std::size_t>(g.d)), q(static_cast<std::size_t>(g.d));
  for (std::size_t i = 0; i < N; ++i) {
    unravel(i, g, q);
    cd s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      unravel(j, g, p);
      double ph = 0.0;
      for (int a = 0; a < g.d; ++a) ph += 2.0 * std::numbers::pi * q[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(a)] / g.n;
      s += f.samples[static_cast<Eigen::Index>(j)] * std::exp(cd(0.0, -ph));
    }
    out[i] = s / static_cast<double>(N);
  }
  return out;
}

/// T(f_1..f_m)(x) evaluated by summing every lattice tuple of the input band
/// and the exponential at each point of an n_out grid.
inline Field naive_multiplier(const SymbolSpec& sigma, const std::vector<Field>& fs, int n_out) {
  const GridSpec& g = fs[0].grid;
  const int m = static_cast<int>(fs.size());
  const double k = g.wavenumber();
  std::vector<std::vector<cd>> hat;
  for (const auto& f : fs) hat.push_back(naive_dft(f));
  const std::size_t N = g.size();
  std::size_t tuples = 1;
  for (int j = 0; j < m; ++j) tuples *= N;
  struct Term {
    std::vector<int> total;
    cd c;
  };
  std::vector<Term> terms;
  Eigen::MatrixXd xi(g.d, m);
  std::vector<int> e(static_cast<std::size_t>(g.d));
  for (std::size_t t = 0; t < tuples; ++t) {
    std::size_t rem = t;
    cd c = 1.0;
    std::vector<int> total(static_cast<std::size_t>(g.d), 0);
    for (int j = 0; j < m; ++j) {
      const std::size_t slot = rem % N;
      rem /= N;
      c *= hat[static_cast<std::size_t>(j)][slot];
      frequency_at(slot, g, e);
      for (int a = 0; a < g.d; ++a) {
        xi(a, j) = k * e[static_cast<std::size_t>(a)];
        total[static_cast<std::size_t>(a)] += e[static_cast<std::size_t>(a)];
      }
    }
    if (std::abs(c) == 0.0) continue;
    terms.push_back({total, c * sigma(xi)});
  }
  return Field::sample(g.with_n(n_out), [&](const Eigen::VectorXd& x) {
    cd v = 0.0;
    for (const auto& term : terms) {
      double ph = 0.0;
      for (int a = 0; a < g.d; ++a) ph += k * term.total[static_cast<std::size_t>(a)] * x[a];
      v += term.c * std::exp(cd(0.0, ph));
    }
    return v;
  });
}

/// Plain quadrature sum without the library.
inline double quad_lp(const Field& f, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.samples.size(); ++i) s += std::pow(std::abs(f.samples[i]), p);
  return std::pow(f.grid.cell_volume() * s, 1.0 / p);
}

inline double rel_l2(const Field& a, const Field& b) {
  const double den = b.samples.norm();
  return den > 0.0 ? (a.samples - b.samples).norm() / den : (a.samples - b.samples).norm();
}

}  // namespace mlab::testing
