#include "mlab/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mlab {

PolyField PolyField::constant(int vars, const Rational& c) {
  PolyField p(vars);
  p.add_term(Monomial(static_cast<std::size_t>(vars), 0), c);
  return p;
}

PolyField PolyField::variable(int vars, int i) {
  if (i < 0 || i >= vars) throw std::out_of_range("PolyField::variable");
  Monomial e(static_cast<std::size_t>(vars), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return monomial(vars, std::move(e), Rational(1));
}

PolyField PolyField::monomial(int vars, Monomial e, const Rational& c) {
  if (static_cast<int>(e.size()) != vars) throw std::invalid_argument("PolyField: monomial size");
  PolyField p(vars);
  p.add_term(e, c);
  return p;
}

int PolyField::degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
  return deg;
}

Rational PolyField::coefficient(const Monomial& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

double PolyField::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& [e, c] : terms_) best = std::max(best, std::abs(c.convert_to<double>()));
  return best;
}

void PolyField::add_term(const Monomial& e, const Rational& c) {
  if (static_cast<int>(e.size()) != vars_) throw std::invalid_argument("PolyField: monomial size");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

PolyField PolyField::derivative(int i) const {
  if (i < 0 || i >= vars_) throw std::out_of_range("PolyField::derivative");
  PolyField out(vars_);
  for (const auto& [e, c] : terms_) {
    const int k = e[static_cast<std::size_t>(i)];
    if (k == 0) continue;
    Monomial f = e;
    --f[static_cast<std::size_t>(i)];
    out.add_term(f, c * k);
  }
  return out;
}

Rational PolyField::evaluate(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != vars_) throw std::invalid_argument("PolyField::evaluate: arity");
  Rational total = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < vars_; ++i)
      for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) t *= x[static_cast<std::size_t>(i)];
    total += t;
  }
  return total;
}

void PolyField::require_compatible(const PolyField& o) const {
  if (vars_ != o.vars_) throw std::invalid_argument("PolyField: variable count mismatch");
}

PolyField& PolyField::operator+=(const PolyField& o) {
  require_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

PolyField& PolyField::operator-=(const PolyField& o) {
  require_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

PolyField& PolyField::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

PolyField operator*(const PolyField& a, const PolyField& b) {
  a.require_compatible(b);
  PolyField out(a.vars_);
  Monomial e(static_cast<std::size_t>(a.vars_));
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

std::string PolyField::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const Rational a = c < 0 ? Rational(-c) : c;
    const bool unit = a == 1;
    bool any_var = false;
    if (!unit) os << a;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!unit || any_var) os << "*";
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      any_var = true;
    }
    if (unit && !any_var) os << "1";
  }
  return os.str();
}

Rational random_rational(std::mt19937_64& rng, int num_range, int den_range) {
  std::uniform_int_distribution<int> num(-num_range, num_range);
  std::uniform_int_distribution<int> den(1, den_range);
  return Rational(num(rng), den(rng));
}

PolyField random_poly(int vars, int degree, std::mt19937_64& rng, double density) {
  PolyField p(vars);
  std::bernoulli_distribution keep(density);
  Monomial e(static_cast<std::size_t>(vars), 0);
  // Odometer over exponent vectors with total degree <= degree.
  while (true) {
    if (std::accumulate(e.begin(), e.end(), 0) <= degree && keep(rng))
      p.add_term(e, random_rational(rng));
    int i = vars - 1;
    while (i >= 0 && ++e[static_cast<std::size_t>(i)] > degree) {
      e[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return p;
}

std::vector<Permutation> permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)]) ++inversions;
    out.push_back({p, inversions % 2 ? -1 : 1});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

PolyField determinant(const std::vector<std::vector<PolyField>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) throw std::invalid_argument("determinant: empty matrix");
  const int vars = a[0][0].vars();
  PolyField total(vars);
  for (const auto& perm : permutations(n)) {
    PolyField term = PolyField::constant(vars, Rational(perm.sign));
    for (int i = 0; i < n && !term.is_zero(); ++i)
      term = term * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(perm.p[static_cast<std::size_t>(i)])];
    total += term;
  }
  return total;
}

}  // namespace mlab
