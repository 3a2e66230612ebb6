#pragma once

// Multivariate polynomials with exact rational coefficients.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace mlab {

using Rational = boost::multiprecision::cpp_rational;
using Monomial = std::vector<int>;  ///< exponent per variable

class PolyField {
 public:
  using Terms = std::map<Monomial, Rational>;

  explicit PolyField(int vars = 1) : vars_(vars) {}

  static PolyField constant(int vars, const Rational& c);
  static PolyField variable(int vars, int i);
  static PolyField monomial(int vars, Monomial e, const Rational& c);

  int vars() const { return vars_; }
  int degree() const;  ///< -1 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }
  Rational coefficient(const Monomial& e) const;
  /// Largest |coefficient| as a double.
  double max_abs_coefficient() const;

  /// Adds c x^e; drops the term if it cancels.
  void add_term(const Monomial& e, const Rational& c);

  PolyField derivative(int i) const;
  Rational evaluate(const std::vector<Rational>& x) const;

  PolyField& operator+=(const PolyField& o);
  PolyField& operator-=(const PolyField& o);
  PolyField& operator*=(const Rational& c);
  friend PolyField operator+(PolyField a, const PolyField& b) { return a += b; }
  friend PolyField operator-(PolyField a, const PolyField& b) { return a -= b; }
  friend PolyField operator-(PolyField a) { return a *= Rational(-1); }
  friend PolyField operator*(const PolyField& a, const PolyField& b);
  friend PolyField operator*(const Rational& c, PolyField a) { return a *= c; }
  friend bool operator==(const PolyField& a, const PolyField& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  void require_compatible(const PolyField& o) const;

  int vars_;
  Terms terms_;
};

/// Random rational in {p/q : |p| <= num_range, 1 <= q <= den_range}.
Rational random_rational(std::mt19937_64& rng, int num_range = 9, int den_range = 6);

/// Random polynomial of total degree <= degree; each monomial present with
/// probability `density`.
PolyField random_poly(int vars, int degree, std::mt19937_64& rng, double density = 0.6);

/// All permutations of {0..n-1} in lexicographic order, with their signs.
struct Permutation {
  std::vector<int> p;
  int sign = 1;
};
std::vector<Permutation> permutations(int n);

/// Leibniz determinant of a square matrix of polynomials (row-major).
PolyField determinant(const std::vector<std::vector<PolyField>>& a);

}  // namespace mlab
