#pragma once

// Multiplier symbols a(xi_1, ..., xi_m) and sampled checks of the standard
// smoothness/decay hypotheses on them.
//
// A symbol is evaluated on a d x m matrix whose column j is xi_j in physical
// units (lattice frequency times 2 pi / period).

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mlab {

using cd = std::complex<double>;

struct SymbolFlags {
  bool poly_homogeneous = false;  ///< invariant under independent positive slot scalings
  bool multilinear = false;
  bool alternating = false;       ///< multilinear and zero on repeated slots
  int alternating_power = 0;      ///< k when the symbol is (alternating base)^k
  bool product_form = false;      ///< a_1(xi_1) ... a_m(xi_m)
};

/// Value on tuples with a zero slot.
enum class ZeroRule { Evaluate, Zero };

struct SymbolSpec {
  using Evaluator = std::function<cd(const Eigen::MatrixXd&)>;

  std::string id;
  int m = 1;
  int d = 1;
  Evaluator evaluate;
  SymbolFlags flags;
  ZeroRule zero_rule = ZeroRule::Evaluate;

  cd operator()(const Eigen::MatrixXd& xi) const {
    if (zero_rule == ZeroRule::Zero)
      for (Eigen::Index j = 0; j < xi.cols(); ++j)
        if (xi.col(j).isZero(0.0)) return 0.0;
    return evaluate(xi);
  }
};

/// Determinant of a small square matrix by the Leibniz sum (d <= 4) or LU.
double small_determinant(const Eigen::MatrixXd& a);

SymbolSpec one_symbol(int m, int d);
/// det(xi_1, ..., xi_d), frequencies as columns.
SymbolSpec det_symbol(int d);
/// det of the rows `axes` of [xi_1 ... xi_m]; alternating multilinear, m = axes.size().
SymbolSpec minor_symbol(int d, std::vector<int> axes);
/// xi_1 . xi_2
SymbolSpec dot_symbol(int d);
/// base^k
SymbolSpec power_symbol(const SymbolSpec& base, int k);

enum class PowerKind {
  Auto,      ///< Signed for integer beta, Absolute otherwise
  Absolute,  ///< |base|^beta / prod |xi_j|^beta
  Signed,    ///< base^k / prod |xi_j|^k, integer k
};
SymbolSpec normalized_power_symbol(const SymbolSpec& base, double beta,
                                   PowerKind kind = PowerKind::Auto);

/// xi_axis / |xi| (arity 1, axis 0-based).
SymbolSpec riesz_symbol(int d, int axis);
/// a_1(xi_1) ... a_m(xi_m) from arity-1 factors.
SymbolSpec product_symbol(const std::vector<SymbolSpec>& factors);

/// Registry: "one", "det", "det_pow:k", "det_norm:beta", "dot_norm:beta",
/// "riesz_product:j1,...,jm" (1-based axes). `m` is only used by "one".
SymbolSpec symbol_from_id(const std::string& id, int d, int m = 2);

// ---------------------------------------------------------------------------
// Sampled hypothesis checks

struct AlphaConstant {
  std::vector<int> alpha;  ///< flattened multi-index over (slot, axis)
  double constant = 0.0;
};

struct ConditionReport {
  std::string condition;
  std::string sample_description;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::vector<AlphaConstant> constants;
  std::vector<double> per_scale;  ///< supremum at each scale / each R
  double worst_ratio = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

ConditionReport check_poly_homogeneity(const SymbolSpec& sigma, int samples,
                                       std::uint64_t seed = 1, double threshold = 1e-10);

enum class DerivativeWeight { CM, Product };

/// Finite-difference estimate of sup |d^alpha sigma| * weight^{|alpha|} over
/// 6 dyadic scales 2^-2 .. 2^3. Passes when the per-scale suprema agree
/// within `threshold` (a ratio) and are finite.
ConditionReport check_derivative_conditions(const SymbolSpec& sigma, DerivativeWeight which,
                                            int max_order, int samples,
                                            std::uint64_t seed = 1, double threshold = 2.0);

/// Discrete H^order norm of a(R .) over the product annulus 1 <= |zeta| <= 2
/// in R^{m d}, for each R. `per_scale` holds the norms; passes when they are
/// finite and agree within `threshold` (a ratio).
ConditionReport check_hormander_annulus(const SymbolSpec& a, int smoothness_order,
                                        const std::vector<double>& R_list,
                                        int points_per_axis = 8, double threshold = 2.0);

}  // namespace mlab
