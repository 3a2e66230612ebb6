#pragma once

// Jacobian and Hessian determinants of periodic fields, computed pointwise
// from spectral derivatives and as multilinear multipliers, plus exact
// polynomial checks of the divergence identities behind them.
//
// Conventions: (grad u)_{ij} = d_i u_j for a map u = (u_1, ..., u_d), and
// C_{ij} is the (i, j) cofactor of that matrix. For a scalar u the second
// cofactor of its Hessian H is
//   C^{kl}_{ij} = d^2 det(H) / dH_{ij} dH_{kl}.

#include "mlab/grid_spectral.hpp"
#include "mlab/multilinear_op.hpp"
#include "mlab/poly.hpp"

#include <span>
#include <string>
#include <vector>

namespace mlab {

// ---------------------------------------------------------------------------
// Numeric paths

/// det(grad u) on the grid padded by d; derivatives are taken on the input
/// grid and then interpolated, so Nyquist modes drop out.
Field jacobian_det_pointwise(std::span<const Field> u);
/// det(grad^2 u) on the grid padded by d.
Field hessian_det_pointwise(const Field& u);

/// det(grad u) = i^d T_det(u_1, ..., u_d).
cd jacobian_constant(int d);
/// det(grad^2 u) = ((-1)^d / d!) T_{det^2}(u, ..., u).
cd hessian_constant(int d);

Field jacobian_det_fourier(std::span<const Field> u, const DirectOptions& opts = {});
Field hessian_det_fourier(const Field& u, const DirectOptions& opts = {});

/// <det grad u, phi> and <det grad^2 u, phi> through pair_direct, with the
/// inputs read as u(2^t x).
cd jacobian_pairing(std::span<const Field> u, const Field& phi, int dilation = 0);
cd hessian_pairing(const Field& u, const Field& phi, int dilation = 0);

/// Ratio pointwise / T for a single-mode input, for checking the frozen constants.
cd calibrate_jacobian_constant(int d);
cd calibrate_hessian_constant(int d);

// ---------------------------------------------------------------------------
// Exact identity checks

struct DetReport {
  std::string identity;
  int d = 0;
  int degree = 0;        ///< largest input degree
  int instances = 0;
  bool pass = false;
  std::size_t residual_terms = 0;  ///< nonzero terms summed over all residuals
  double max_residual = 0.0;       ///< largest |coefficient| over all residuals
  std::string residual = "0";      ///< first nonzero residual, if any
};

/// Folds one residual polynomial into the report.
void record_residual(DetReport& r, const PolyField& residual);

std::vector<std::vector<PolyField>> jacobian_matrix(const std::vector<PolyField>& u);
std::vector<std::vector<PolyField>> hessian_matrix(const PolyField& u);
std::vector<std::vector<PolyField>> cofactor_matrix(const std::vector<std::vector<PolyField>>& a);
/// C^{kl}_{ij} of a square matrix (zero when i = k or j = l).
PolyField second_cofactor(const std::vector<std::vector<PolyField>>& a, int i, int j, int k, int l);

/// Column divergence of the cofactor matrix vanishes and
/// det(grad u) = sum_i d_i(u_j C_{ij}) for every j.
DetReport symbolic_piola_check(int d, const std::vector<PolyField>& u);

/// 2 det(grad^2 u) = 2 d_12(d_1u d_2u) - d_11(|d_2u|^2) - d_22(|d_1u|^2).
DetReport symbolic_hessian2d_check(const PolyField& u);

/// det P_tau = sign(tau) prod_i nu_{tau(i),i} det(nu_1, ..., nu_d) where the
/// i-th column of P_tau is nu_{tau(i),i} nu_{tau(i)}; nu[j] is the vector nu_j.
DetReport symbolic_detPtau_check(int d, const std::vector<int>& tau,
                                 const std::vector<std::vector<Rational>>& nu);
/// Same identity with the d^2 entries of nu as independent variables.
DetReport symbolic_detPtau_polynomial_check(int d, const std::vector<int>& tau);
/// sum_tau det P_tau = det(nu_1, ..., nu_d)^2 as polynomials.
DetReport symbolic_detPtau_sum_check(int d);

/// sum_{sigma,tau} sgn sgn d_{sigma(2)} d_{tau(2)} [d_{sigma(1)}u d_{tau(1)}u prod_{k>=3} d_{sigma(k)} d_{tau(k)} u]
PolyField double_permutation_sum(const PolyField& u);
/// sum_{i,j} d_i d_j [sum_{k != i, l != j} d_k u d_l u C^{kl}_{ij}]
PolyField second_cofactor_divergence(const PolyField& u);

/// d! det(grad^2 u) = -double_permutation_sum(u) and
/// d(d-1) det(grad^2 u) = -second_cofactor_divergence(u), together with the
/// row-swap, column-swap, transpose and pair-exchange symmetries of C^{kl}_{ij}.
DetReport symbolic_baer_jerison_check(int d, const PolyField& u);
/// The same, split into {d!-formula, divergence form, symmetries}.
std::vector<DetReport> symbolic_baer_jerison_suite(int d, const PolyField& u);

/// Runs every identity that applies to each dimension in `dims` over
/// `instances` seeded random inputs; one aggregated report per identity and d.
std::vector<DetReport> verify_identities(const std::vector<int>& dims, int instances = 20,
                                         std::uint64_t seed = 1);

}  // namespace mlab
