#pragma once

// Dyadic (Littlewood-Paley) partition of unity on the frequency lattice and
// separable expansions of degree-0 poly-homogeneous symbols on the annulus
// 1/4 <= |x| <= 4.
//
// Radii are measured in lattice units (|xi| for integer xi).

#include "mlab/grid_spectral.hpp"
#include "mlab/symbols.hpp"

#include <filesystem>
#include <vector>

namespace mlab {

/// C^inf step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
/// 1 on r <= 1, 0 on r >= 2, smooth in log2 r between.
double radial_cutoff(double r);
/// psi(r) = chi(r) - chi(2r); supported in [1/2, 2], psi(1) = 1.
double dyadic_bump(double r);
/// phi(r) = chi(r/2) - chi(4r); equals 1 on [1/2, 2], supported in [1/4, 4].
double annulus_cutoff(double r);

struct DyadicPartition {
  int j_min = 0;
  int j_max = 0;

  /// psi(2^-j r)
  double weight(int j, double r) const;
  /// sum_{j=j_min}^{j_max} psi(2^-j r); exactly 1 on [2^j_min, 2^j_max].
  double partial_sum(double r) const;
  bool covers(double r) const;
};

DyadicPartition build_partition(int j_min, int j_max);
/// Smallest partition covering every nonzero frequency of the grid.
DyadicPartition covering_partition(const GridSpec& grid);

/// Spectrum multiplied by psi(2^-j |xi|).
Field localize(const Field& f, const DyadicPartition& partition, int j);

/// Annulus discretization for one slot: radial nodes uniform in log2 r over
/// [-2, 2) and a direction set (d = 1: {+1, -1}; d = 2: N equispaced angles;
/// d = 3: N azimuths x N/2 mid-point polar angles). Node (i, k) sits at
/// linear index i * directions() + k.
struct AnnulusGrid {
  int d = 2;
  int radial = 16;   ///< multiple of 4, power of two
  int angular = 64;  ///< power of two (ignored for d = 1)

  int directions() const;
  int points() const { return radial * directions(); }
  double radius(int i) const;
  double radial_weight(int i) const;          ///< r^d ln2 dlog2r
  Eigen::MatrixXd direction_nodes() const;    ///< d x directions()
  Eigen::VectorXd direction_weights() const;  ///< surface measure
  void validate() const;

  /// Interpolation weights over direction nodes at unit vector u
  /// (periodic trigonometric interpolation).
  Eigen::VectorXd direction_interpolation(const Eigen::VectorXd& u) const;
};

/// sum_l coefficients[l] * prod_j factors[l][j](x_j) approximating
/// phi(|x_1|) ... phi(|x_m|) sigma(x_1, ..., x_m) on the annulus grid.
struct SeparableExpansion {
  int m = 2;
  int d = 2;
  AnnulusGrid grid;
  std::vector<cd> coefficients;
  std::vector<std::vector<Eigen::VectorXcd>> factors;  ///< [term][slot], grid.points() each
  double residual = 0.0;         ///< relative weighted Frobenius error of the truncation
  std::vector<double> spectrum;  ///< nonincreasing |coefficient| sequence before truncation

  int rank() const { return static_cast<int>(coefficients.size()); }

  /// Every term's factor for `slot`, interpolated at x (1/2 <= |x| <= 2 for
  /// exact radial lookup).
  Eigen::VectorXcd factor_values(int slot, const Eigen::VectorXd& x) const;
  /// Reconstructed value of the expansion at a tuple (d x m).
  cd evaluate(const Eigen::MatrixXd& x) const;
};

/// Requires a poly-homogeneous symbol. m = 2: truncated SVD; m > 2: greedy
/// rank-one deflation with 200 alternating sweeps per term. Rank is clamped
/// to the available dimension.
SeparableExpansion separable_expand(const SymbolSpec& sigma, const AnnulusGrid& grid, int rank);
/// `annulus_points` angular nodes and annulus_points / 2 radial nodes.
SeparableExpansion separable_expand(const SymbolSpec& sigma, int annulus_points, int rank);

/// Writes <prefix>.json (header) and <prefix>.fld (factor tables as MLABFLD1
/// records, term-major then slot).
void save_expansion(const std::filesystem::path& prefix, const SeparableExpansion& e);
SeparableExpansion load_expansion(const std::filesystem::path& prefix);

}  // namespace mlab
