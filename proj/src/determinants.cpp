#include "mlab/determinants.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mlab {

namespace {

cd det_small(const Eigen::MatrixXcd& a) {
  switch (a.rows()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      return a.partialPivLu().determinant();
  }
}

/// Pointwise determinant of a d x d table of fields on a common grid.
Field pointwise_det(const std::vector<std::vector<Field>>& m, bool real) {
  const int d = static_cast<int>(m.size());
  Field out = Field::zeros(m[0][0].grid);
  Eigen::MatrixXcd a(d, d);
  for (Eigen::Index p = 0; p < out.samples.size(); ++p) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].samples[p];
    out.samples[p] = det_small(a);
  }
  out.real = real;
  return out;
}

double factorial(int d) {
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

DirectOptions nyquist_consistent(DirectOptions opts) {
  opts.nyquist_as_zero = true;
  return opts;
}

const GridSpec& map_grid(std::span<const Field> u) {
  if (u.empty()) throw std::invalid_argument("determinant: no components");
  for (const auto& f : u) u[0].require_same_grid(f);
  if (static_cast<int>(u.size()) != u[0].grid.d)
    throw std::invalid_argument("determinant: need exactly d components");
  return u[0].grid;
}

/// Projection coefficient <a, b> / <b, b> of a onto b.
cd projection_ratio(const Field& a, const Field& b) {
  return b.samples.dot(a.samples) / b.samples.squaredNorm();
}

}  // namespace

Field jacobian_det_pointwise(std::span<const Field> u) {
  const GridSpec& g = map_grid(u);
  const int d = g.d;
  const int n_pad = padded_size(g.n, d);
  std::vector<std::vector<Field>> m(static_cast<std::size_t>(d), std::vector<Field>(static_cast<std::size_t>(d)));
  bool real = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          resample(spectral_derivative(u[static_cast<std::size_t>(j)], i), n_pad);
      real = real && u[static_cast<std::size_t>(j)].real;
    }
  return pointwise_det(m, real);
}

Field hessian_det_pointwise(const Field& u) {
  const int d = u.grid.d;
  const int n_pad = padded_size(u.grid.n, d);
  std::vector<Field> du;
  for (int a = 0; a < d; ++a) du.push_back(spectral_derivative(u, a));
  std::vector<std::vector<Field>> m(static_cast<std::size_t>(d), std::vector<Field>(static_cast<std::size_t>(d)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          resample(spectral_derivative(du[static_cast<std::size_t>(a)], b), n_pad);
  return pointwise_det(m, u.real);
}

cd jacobian_constant(int d) { return std::pow(cd(0.0, 1.0), d); }

cd hessian_constant(int d) { return (d % 2 ? -1.0 : 1.0) / factorial(d); }

Field jacobian_det_fourier(std::span<const Field> u, const DirectOptions& opts) {
  const GridSpec& g = map_grid(u);
  if (g.d < 2) throw std::invalid_argument("jacobian_det_fourier: d must be >= 2");
  Field out = jacobian_constant(g.d) * apply_direct(direct_operator(det_symbol(g.d)), u, nyquist_consistent(opts));
  bool real = true;
  for (const auto& f : u) real = real && f.real;
  out.real = real;
  return out;
}

Field hessian_det_fourier(const Field& u, const DirectOptions& opts) {
  const int d = u.grid.d;
  if (d < 2) throw std::invalid_argument("hessian_det_fourier: d must be >= 2");
  const std::vector<Field> copies(static_cast<std::size_t>(d), u);
  Field out = hessian_constant(d) *
              apply_direct(direct_operator(power_symbol(det_symbol(d), 2)), copies, nyquist_consistent(opts));
  out.real = u.real;
  return out;
}

cd jacobian_pairing(std::span<const Field> u, const Field& phi, int dilation) {
  const GridSpec& g = map_grid(u);
  DirectOptions opts;
  opts.dilation = dilation;
  return jacobian_constant(g.d) *
         pair_direct(direct_operator(det_symbol(g.d)), u, phi, nyquist_consistent(opts));
}

cd hessian_pairing(const Field& u, const Field& phi, int dilation) {
  const int d = u.grid.d;
  const std::vector<Field> copies(static_cast<std::size_t>(d), u);
  DirectOptions opts;
  opts.dilation = dilation;
  return hessian_constant(d) *
         pair_direct(direct_operator(power_symbol(det_symbol(d), 2)), copies, phi, nyquist_consistent(opts));
}

cd calibrate_jacobian_constant(int d) {
  const GridSpec g{d, 8};
  std::vector<Field> u;
  for (int j = 0; j < d; ++j)
    u.push_back(Field::sample(g, [j](const Eigen::VectorXd& x) { return std::exp(cd(0.0, x[j])); }));
  const Field pointwise = jacobian_det_pointwise(u);
  const Field t = apply_direct(direct_operator(det_symbol(d)), u);
  return projection_ratio(pointwise, t);
}

cd calibrate_hessian_constant(int d) {
  const GridSpec g{d, 8};
  const Field u = Field::sample(g, [d](const Eigen::VectorXd& x) {
    cd s = 0.0;
    for (int j = 0; j < d; ++j) s += std::exp(cd(0.0, x[j]));
    return s;
  });
  const Field pointwise = hessian_det_pointwise(u);
  const std::vector<Field> copies(static_cast<std::size_t>(d), u);
  const Field t = apply_direct(direct_operator(power_symbol(det_symbol(d), 2)), copies);
  return projection_ratio(pointwise, t);
}

// ---------------------------------------------------------------------------
// Exact identities

void record_residual(DetReport& r, const PolyField& residual) {
  if (residual.is_zero()) return;
  if (r.residual_terms == 0) r.residual = residual.to_string();
  r.residual_terms += residual.term_count();
  r.max_residual = std::max(r.max_residual, residual.max_abs_coefficient());
}

namespace {

DetReport start_report(std::string id, int d) {
  DetReport r;
  r.identity = std::move(id);
  r.d = d;
  return r;
}

void finish(DetReport& r) { r.pass = r.residual_terms == 0; }

using PolyMatrix = std::vector<std::vector<PolyField>>;

int sign_of(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

void merge(DetReport& into, const DetReport& r) {
  into.instances += r.instances;
  into.degree = std::max(into.degree, r.degree);
  if (r.residual_terms && !into.residual_terms) into.residual = r.residual;
  into.residual_terms += r.residual_terms;
  into.max_residual = std::max(into.max_residual, r.max_residual);
  finish(into);
}

}  // namespace

PolyMatrix jacobian_matrix(const std::vector<PolyField>& u) {
  const int d = static_cast<int>(u.size());
  PolyMatrix j(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int c = 0; c < d; ++c) j[static_cast<std::size_t>(i)].push_back(u[static_cast<std::size_t>(c)].derivative(i));
  return j;
}

PolyMatrix hessian_matrix(const PolyField& u) {
  const int d = u.vars();
  PolyMatrix h(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const PolyField di = u.derivative(i);
    for (int j = 0; j < d; ++j) h[static_cast<std::size_t>(i)].push_back(di.derivative(j));
  }
  return h;
}

PolyMatrix cofactor_matrix(const PolyMatrix& a) {
  const int n = static_cast<int>(a.size());
  const int vars = a[0][0].vars();
  PolyMatrix c(static_cast<std::size_t>(n), std::vector<PolyField>(static_cast<std::size_t>(n), PolyField(vars)));
  if (n == 1) {
    c[0][0] = PolyField::constant(vars, 1);
    return c;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      PolyMatrix minor;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        std::vector<PolyField> row;
        for (int s = 0; s < n; ++s)
          if (s != j) row.push_back(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]);
        minor.push_back(std::move(row));
      }
      PolyField m = determinant(minor);
      if ((i + j) % 2) m *= Rational(-1);
      c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(m);
    }
  return c;
}

PolyField second_cofactor(const PolyMatrix& a, int i, int j, int k, int l) {
  const int n = static_cast<int>(a.size());
  const int vars = a[0][0].vars();
  PolyField total(vars);
  if (i == k || j == l) return total;
  for (const auto& perm : permutations(n)) {
    if (perm.p[static_cast<std::size_t>(i)] != j || perm.p[static_cast<std::size_t>(k)] != l) continue;
    PolyField term = PolyField::constant(vars, Rational(perm.sign));
    for (int r = 0; r < n && !term.is_zero(); ++r)
      if (r != i && r != k) term = term * a[static_cast<std::size_t>(r)][static_cast<std::size_t>(perm.p[static_cast<std::size_t>(r)])];
    total += term;
  }
  return total;
}

DetReport symbolic_piola_check(int d, const std::vector<PolyField>& u) {
  if (d < 2 || d > 4 || static_cast<int>(u.size()) != d)
    throw std::invalid_argument("symbolic_piola_check: need 2 <= d <= 4 and d components");
  DetReport r = start_report("piola", d);
  r.instances = 1;
  for (const auto& c : u) r.degree = std::max(r.degree, c.degree());
  const auto J = jacobian_matrix(u);
  const auto C = cofactor_matrix(J);
  const PolyField det = determinant(J);
  for (int j = 0; j < d; ++j) {
    PolyField div(d), flux(d);
    for (int i = 0; i < d; ++i) {
      const auto& cij = C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      div += cij.derivative(i);
      flux += (u[static_cast<std::size_t>(j)] * cij).derivative(i);
    }
    record_residual(r, div);
    record_residual(r, det - flux);
  }
  finish(r);
  return r;
}

DetReport symbolic_hessian2d_check(const PolyField& u) {
  if (u.vars() != 2) throw std::invalid_argument("symbolic_hessian2d_check: d must be 2");
  DetReport r = start_report("hessian-2d", 2);
  r.instances = 1;
  r.degree = u.degree();
  const PolyField u1 = u.derivative(0), u2 = u.derivative(1);
  const PolyField lhs = Rational(2) * determinant(hessian_matrix(u));
  const PolyField rhs = Rational(2) * (u1 * u2).derivative(0).derivative(1) -
                        (u2 * u2).derivative(0).derivative(0) - (u1 * u1).derivative(1).derivative(1);
  record_residual(r, lhs - rhs);
  finish(r);
  return r;
}

namespace {

/// Residual of the det P_tau factorization with entries nu[a][r] given as polynomials.
PolyField detPtau_residual(int d, const std::vector<int>& tau, const PolyMatrix& nu) {
  const int vars = nu[0][0].vars();
  PolyMatrix P(static_cast<std::size_t>(d), std::vector<PolyField>(static_cast<std::size_t>(d), PolyField(vars)));
  PolyMatrix N = P;
  for (int i = 0; i < d; ++i) {
    const auto& v = nu[static_cast<std::size_t>(tau[static_cast<std::size_t>(i)])];
    for (int row = 0; row < d; ++row) {
      P[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(row)];
      N[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] = nu[static_cast<std::size_t>(i)][static_cast<std::size_t>(row)];
    }
  }
  PolyField rhs = PolyField::constant(vars, Rational(sign_of(tau)));
  for (int i = 0; i < d; ++i)
    rhs = rhs * nu[static_cast<std::size_t>(tau[static_cast<std::size_t>(i)])][static_cast<std::size_t>(i)];
  rhs = rhs * determinant(N);
  return determinant(P) - rhs;
}

PolyMatrix symbolic_nu(int d) {
  PolyMatrix nu(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a)
    for (int r = 0; r < d; ++r) nu[static_cast<std::size_t>(a)].push_back(PolyField::variable(d * d, a * d + r));
  return nu;
}

void check_permutation(int d, const std::vector<int>& tau) {
  std::vector<int> sorted = tau;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < d; ++i)
    if (static_cast<int>(sorted.size()) != d || sorted[static_cast<std::size_t>(i)] != i)
      throw std::invalid_argument("det P_tau: tau is not a permutation of 0..d-1");
}

}  // namespace

DetReport symbolic_detPtau_check(int d, const std::vector<int>& tau,
                                 const std::vector<std::vector<Rational>>& nu) {
  if (d < 2 || d > 5) throw std::invalid_argument("symbolic_detPtau_check: need 2 <= d <= 5");
  check_permutation(d, tau);
  if (static_cast<int>(nu.size()) != d) throw std::invalid_argument("symbolic_detPtau_check: need d vectors");
  PolyMatrix pn(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    if (static_cast<int>(nu[static_cast<std::size_t>(a)].size()) != d)
      throw std::invalid_argument("symbolic_detPtau_check: vectors must have d entries");
    for (int r = 0; r < d; ++r) pn[static_cast<std::size_t>(a)].push_back(PolyField::constant(1, nu[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)]));
  }
  DetReport r = start_report("detPtau", d);
  r.instances = 1;
  record_residual(r, detPtau_residual(d, tau, pn));
  finish(r);
  return r;
}

DetReport symbolic_detPtau_polynomial_check(int d, const std::vector<int>& tau) {
  if (d < 2 || d > 5) throw std::invalid_argument("symbolic_detPtau_polynomial_check: need 2 <= d <= 5");
  check_permutation(d, tau);
  DetReport r = start_report("detPtau-polynomial", d);
  r.instances = 1;
  r.degree = 1;
  record_residual(r, detPtau_residual(d, tau, symbolic_nu(d)));
  finish(r);
  return r;
}

DetReport symbolic_detPtau_sum_check(int d) {
  if (d < 2 || d > 4) throw std::invalid_argument("symbolic_detPtau_sum_check: need 2 <= d <= 4");
  const auto nu = symbolic_nu(d);
  const int vars = d * d;
  PolyField sum(vars);
  for (const auto& perm : permutations(d)) {
    PolyMatrix P(static_cast<std::size_t>(d), std::vector<PolyField>(static_cast<std::size_t>(d), PolyField(vars)));
    for (int i = 0; i < d; ++i) {
      const auto& v = nu[static_cast<std::size_t>(perm.p[static_cast<std::size_t>(i)])];
      for (int row = 0; row < d; ++row)
        P[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(row)];
    }
    sum += determinant(P);
  }
  PolyMatrix N(static_cast<std::size_t>(d), std::vector<PolyField>(static_cast<std::size_t>(d), PolyField(vars)));
  for (int i = 0; i < d; ++i)
    for (int row = 0; row < d; ++row) N[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] = nu[static_cast<std::size_t>(i)][static_cast<std::size_t>(row)];
  const PolyField dn = determinant(N);
  DetReport r = start_report("detPtau-sum", d);
  r.instances = static_cast<int>(permutations(d).size());
  r.degree = 1;
  record_residual(r, sum - dn * dn);
  finish(r);
  return r;
}

PolyField double_permutation_sum(const PolyField& u) {
  const int d = u.vars();
  std::vector<PolyField> grad;
  for (int i = 0; i < d; ++i) grad.push_back(u.derivative(i));
  const auto H = hessian_matrix(u);
  const auto perms = permutations(d);
  PolyField total(d);
  for (const auto& s : perms)
    for (const auto& t : perms) {
      PolyField inner = grad[static_cast<std::size_t>(s.p[0])] * grad[static_cast<std::size_t>(t.p[0])];
      for (int k = 2; k < d && !inner.is_zero(); ++k)
        inner = inner * H[static_cast<std::size_t>(s.p[static_cast<std::size_t>(k)])][static_cast<std::size_t>(t.p[static_cast<std::size_t>(k)])];
      PolyField term = inner.derivative(s.p[1]).derivative(t.p[1]);
      if (s.sign * t.sign < 0) term *= Rational(-1);
      total += term;
    }
  return total;
}

PolyField second_cofactor_divergence(const PolyField& u) {
  const int d = u.vars();
  std::vector<PolyField> grad;
  for (int i = 0; i < d; ++i) grad.push_back(u.derivative(i));
  const auto H = hessian_matrix(u);
  PolyField total(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      PolyField inner(d);
      for (int k = 0; k < d; ++k) {
        if (k == i) continue;
        for (int l = 0; l < d; ++l) {
          if (l == j) continue;
          inner += grad[static_cast<std::size_t>(k)] * grad[static_cast<std::size_t>(l)] * second_cofactor(H, i, j, k, l);
        }
      }
      total += inner.derivative(i).derivative(j);
    }
  return total;
}

std::vector<DetReport> symbolic_baer_jerison_suite(int d, const PolyField& u) {
  if (d < 2 || d > 3 || u.vars() != d)
    throw std::invalid_argument("symbolic_baer_jerison_check: need d in {2, 3} and a d-variable polynomial");
  const auto H = hessian_matrix(u);
  const PolyField det = determinant(H);

  DetReport full = start_report("baer-jerison-dfactorial", d);
  DetReport div = start_report("baer-jerison-divergence", d);
  DetReport sym = start_report("second-cofactor-symmetries", d);
  for (auto* r : {&full, &div, &sym}) {
    r->instances = 1;
    r->degree = u.degree();
  }
  record_residual(full, Rational(static_cast<long>(factorial(d))) * det + double_permutation_sum(u));
  record_residual(div, Rational(d * (d - 1)) * det + second_cofactor_divergence(u));

  std::vector<PolyField> C;
  auto at = [&](int i, int j, int k, int l) -> const PolyField& {
    return C[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) C.push_back(second_cofactor(H, i, j, k, l));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const PolyField& c = at(i, j, k, l);
          record_residual(sym, c + at(k, j, i, l));  // row swap
          record_residual(sym, c + at(i, l, k, j));  // column swap
          record_residual(sym, c - at(j, i, l, k));  // transpose
          record_residual(sym, c - at(k, l, i, j));  // pair exchange
        }
  for (auto* r : {&full, &div, &sym}) finish(*r);
  return {full, div, sym};
}

DetReport symbolic_baer_jerison_check(int d, const PolyField& u) {
  const auto parts = symbolic_baer_jerison_suite(d, u);
  DetReport r = start_report("baer-jerison", d);
  r.degree = u.degree();
  for (const auto& p : parts) {
    if (p.residual_terms && !r.residual_terms) r.residual = p.residual;
    r.residual_terms += p.residual_terms;
    r.max_residual = std::max(r.max_residual, p.max_residual);
  }
  r.instances = 1;
  finish(r);
  return r;
}

std::vector<DetReport> verify_identities(const std::vector<int>& dims, int instances, std::uint64_t seed) {
  std::vector<DetReport> out;
  std::mt19937_64 rng(seed);
  for (int d : dims) {
    if (d < 2 || d > 4) throw std::invalid_argument("verify_identities: dimensions must lie in 2..4");

    DetReport piola = start_report("piola", d);
    const int piola_degree = d == 4 ? 2 : 3;
    for (int t = 0; t < instances; ++t) {
      std::vector<PolyField> u;
      for (int j = 0; j < d; ++j) u.push_back(random_poly(d, piola_degree, rng));
      merge(piola, symbolic_piola_check(d, u));
    }
    out.push_back(piola);

    if (d == 2) {
      DetReport h2 = start_report("hessian-2d", 2);
      for (int t = 0; t < instances; ++t) merge(h2, symbolic_hessian2d_check(random_poly(2, 4, rng)));
      out.push_back(h2);
    }

    DetReport ptau = start_report("detPtau", d);
    const auto perms = permutations(d);
    for (int t = 0; t < instances; ++t) {
      std::vector<std::vector<Rational>> nu(static_cast<std::size_t>(d));
      for (auto& v : nu)
        for (int r = 0; r < d; ++r) v.push_back(random_rational(rng));
      if (d <= 3) {
        for (const auto& p : perms) merge(ptau, symbolic_detPtau_check(d, p.p, nu));
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
        merge(ptau, symbolic_detPtau_check(d, perms[pick(rng)].p, nu));
      }
    }
    out.push_back(ptau);

    if (d <= 3) {
      DetReport poly = start_report("detPtau-polynomial", d);
      for (const auto& p : perms) merge(poly, symbolic_detPtau_polynomial_check(d, p.p));
      out.push_back(poly);
      out.push_back(symbolic_detPtau_sum_check(d));

      std::vector<DetReport> bj = {start_report("baer-jerison-dfactorial", d),
                                   start_report("baer-jerison-divergence", d),
                                   start_report("second-cofactor-symmetries", d)};
      for (int t = 0; t < instances; ++t) {
        const auto parts = symbolic_baer_jerison_suite(d, random_poly(d, 3, rng));
        for (std::size_t q = 0; q < parts.size(); ++q) merge(bj[q], parts[q]);
      }
      out.insert(out.end(), bj.begin(), bj.end());
    }
  }
  return out;
}

}  // namespace mlab
