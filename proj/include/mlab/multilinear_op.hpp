#pragma once

// The m-linear Fourier multiplier
//
//   T(f_1, ..., f_m)(x) = sum a(xi_1, ..., xi_m) f^_1(xi_1) ... f^_m(xi_m) e^{i k x.(xi_1 + ... + xi_m)}
//
// evaluated three ways: exhaustive enumeration (the oracle), a separable
// fast path built on a dyadic partition, and a pairing that moves powers of
// the output frequency onto a test function as derivatives.

#include "mlab/grid_spectral.hpp"
#include "mlab/lp_decomp.hpp"
#include "mlab/symbols.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>

namespace mlab {

enum class Strategy { Direct, Separable };

struct OperatorSpec {
  SymbolSpec symbol;
  Strategy strategy = Strategy::Direct;
  std::shared_ptr<const SeparableExpansion> expansion;  ///< Separable only
  DyadicPartition partition;                            ///< Separable only
  int pad_factor = 0;  ///< output grid is bit_ceil(pad_factor * n); 0 means m

  int m() const { return symbol.m; }
};

OperatorSpec direct_operator(SymbolSpec symbol);
OperatorSpec separable_operator(SymbolSpec symbol, std::shared_ptr<const SeparableExpansion> e,
                                DyadicPartition partition);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UncoveredSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration cap for the direct oracle: MLAB_BUDGET if set, else 2e8.
std::size_t enumeration_budget();

struct DirectOptions {
  std::size_t budget = 0;  ///< 0: enumeration_budget()
  /// Frequency components equal to -n/2 enter the symbol as 0 (the output
  /// still lands on the true sum frequency). Matches spectral_derivative.
  bool nyquist_as_zero = false;
  double active_tol = 1e-14;  ///< relative threshold for skipping zero coefficients
  /// Read every input as f(2^t x): lattice frequencies are scaled by 2^t
  /// before the symbol and the output see them. Equivalent to dilate_dyadic
  /// with DilationGrid::Scale, without forming the larger grid.
  int dilation = 0;
};

/// Number of tuples apply_direct would visit.
std::size_t direct_tuple_count(std::span<const Field> fs, double active_tol = 1e-14);

Field apply_direct(const OperatorSpec& op, std::span<const Field> fs, const DirectOptions& opts = {});
Field apply_separable(const OperatorSpec& op, std::span<const Field> fs);
/// Dispatches on op.strategy.
Field apply_operator(const OperatorSpec& op, std::span<const Field> fs);

/// <T(f_1..f_m), phi> = period^d sum a(xi) prod f^_j(xi_j) phi^(-sum xi_j),
/// without forming the output. The inputs may live on a finer grid than phi
/// (same period); frequencies outside phi's band contribute nothing.
cd pair_direct(const OperatorSpec& op, std::span<const Field> fs, const Field& phi,
               const DirectOptions& opts = {});

/// Throws std::invalid_argument unless sigma is multilinear and vanishes on
/// repeated slots (random probes).
void require_alternating(const SymbolSpec& sigma, std::uint64_t seed = 7);

/// <T_{sigma^k}(fs), phi> evaluated as
///   sum_{l_1..l_k} i^k <T_{C_l1 ... C_lk}(fs), d_l1 ... d_lk phi>,
/// C_l(xi) = sigma(e_l, xi_2, ..., xi_m), which does not involve xi_1.
cd pair_with_transfer(const SymbolSpec& sigma, int k, std::span<const Field> fs, const Field& phi);

}  // namespace mlab
