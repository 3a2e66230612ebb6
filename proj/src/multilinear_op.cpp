#include "mlab/multilinear_op.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

namespace mlab {

OperatorSpec direct_operator(SymbolSpec symbol) {
  OperatorSpec op;
  op.symbol = std::move(symbol);
  return op;
}

OperatorSpec separable_operator(SymbolSpec symbol, std::shared_ptr<const SeparableExpansion> e,
                                DyadicPartition partition) {
  if (!symbol.flags.poly_homogeneous)
    throw std::invalid_argument("separable strategy requires a poly-homogeneous symbol");
  OperatorSpec op;
  op.symbol = std::move(symbol);
  op.strategy = Strategy::Separable;
  op.expansion = std::move(e);
  op.partition = partition;
  return op;
}

std::size_t enumeration_budget() {
  if (const char* env = std::getenv("MLAB_BUDGET")) {
    try {
      const double v = std::stod(env);
      if (v >= 1.0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 200'000'000;
}

namespace {

/// Active coefficients of one slot.
struct Support {
  std::vector<int> lattice;  ///< d per entry
  std::vector<cd> coeff;
  Eigen::MatrixXd phys;      ///< d x count, symbol arguments
  std::size_t size() const { return coeff.size(); }
};

Support active_support(const Field& f, double tol, bool nyquist_as_zero, int dilation = 0) {
  const auto s = dft_forward(f);
  const GridSpec& g = f.grid;
  const double cmax = s.coeffs.size() ? s.coeffs.cwiseAbs().maxCoeff() : 0.0;
  Support sup;
  std::vector<int> xi(static_cast<std::size_t>(g.d));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cd c = s.coeffs[static_cast<Eigen::Index>(i)];
    if (cmax == 0.0 || std::abs(c) <= tol * cmax) continue;
    frequency_at(i, g, xi);
    for (int q : xi) sup.lattice.push_back(q << dilation);
    sup.coeff.push_back(c);
  }
  const double k = g.wavenumber();
  sup.phys.resize(g.d, static_cast<Eigen::Index>(sup.size()));
  for (std::size_t e = 0; e < sup.size(); ++e)
    for (int a = 0; a < g.d; ++a) {
      const int c = sup.lattice[e * static_cast<std::size_t>(g.d) + static_cast<std::size_t>(a)];
      sup.phys(a, static_cast<Eigen::Index>(e)) = (nyquist_as_zero && c == -(g.n << dilation) / 2) ? 0.0 : k * c;
    }
  return sup;
}

const GridSpec& common_grid(std::span<const Field> fs) {
  if (fs.empty()) throw std::invalid_argument("multilinear operator: no inputs");
  for (const auto& f : fs) fs[0].require_same_grid(f);
  return fs[0].grid;
}

std::size_t tuple_count(const std::vector<Support>& sups) {
  std::size_t total = 1;
  for (const auto& s : sups) {
    if (s.size() == 0) return 0;
    if (total > SIZE_MAX / s.size()) return SIZE_MAX;
    total *= s.size();
  }
  return total;
}

/// Calls visit(symbol value * coefficient product, lattice sum) for every tuple.
template <typename Visit>
void enumerate(const SymbolSpec& sigma, const std::vector<Support>& sups, int d, Visit&& visit) {
  const int m = static_cast<int>(sups.size());
  if (tuple_count(sups) == 0) return;
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  Eigen::MatrixXd xi(d, m);
  std::vector<int> eta(static_cast<std::size_t>(d));
  while (true) {
    cd prod = 1.0;
    std::fill(eta.begin(), eta.end(), 0);
    for (int j = 0; j < m; ++j) {
      const auto& s = sups[static_cast<std::size_t>(j)];
      const std::size_t e = idx[static_cast<std::size_t>(j)];
      xi.col(j) = s.phys.col(static_cast<Eigen::Index>(e));
      prod *= s.coeff[e];
      for (int a = 0; a < d; ++a) eta[static_cast<std::size_t>(a)] += s.lattice[e * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)];
    }
    visit(sigma(xi) * prod, std::span<const int>(eta));
    int j = m - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == sups[static_cast<std::size_t>(j)].size()) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
}

std::vector<Support> supports(const OperatorSpec& op, std::span<const Field> fs,
                              const DirectOptions& opts) {
  common_grid(fs);
  if (static_cast<int>(fs.size()) != op.m())
    throw std::invalid_argument("multilinear operator: expected " + std::to_string(op.m()) + " inputs");
  if (op.symbol.d != fs[0].grid.d) throw std::invalid_argument("multilinear operator: dimension mismatch");
  std::vector<Support> sups;
  if (opts.dilation < 0 || opts.dilation > 20) throw std::invalid_argument("multilinear operator: dilation out of range");
  for (const auto& f : fs) sups.push_back(active_support(f, opts.active_tol, opts.nyquist_as_zero, opts.dilation));
  const std::size_t budget = opts.budget ? opts.budget : enumeration_budget();
  const std::size_t count = tuple_count(sups);
  if (count > budget)
    throw BudgetExceeded("direct enumeration needs " + std::to_string(count) +
                         " tuples, budget is " + std::to_string(budget));
  return sups;
}

}  // namespace

std::size_t direct_tuple_count(std::span<const Field> fs, double active_tol) {
  std::vector<Support> sups;
  for (const auto& f : fs) sups.push_back(active_support(f, active_tol, false));
  return tuple_count(sups);
}

Field apply_direct(const OperatorSpec& op, std::span<const Field> fs, const DirectOptions& opts) {
  const auto sups = supports(op, fs, opts);
  const GridSpec& g = fs[0].grid;
  const int pad = op.pad_factor > 0 ? op.pad_factor : op.m();
  const GridSpec g_out = g.with_n(padded_size(g.n << opts.dilation, pad));
  auto out = Spectrum::zeros(g_out);
  enumerate(op.symbol, sups, g.d, [&](cd v, std::span<const int> eta) {
    if (!fits(eta, g_out)) throw std::logic_error("apply_direct: pad factor too small for the output band");
    out.at(eta) += v;
  });
  return dft_inverse(out);
}

cd pair_direct(const OperatorSpec& op, std::span<const Field> fs, const Field& phi,
               const DirectOptions& opts) {
  const auto sups = supports(op, fs, opts);
  const GridSpec& g = fs[0].grid;
  if (phi.grid.d != g.d || phi.grid.period != g.period)
    throw std::invalid_argument("pair_direct: test function lives on an incompatible torus");
  const auto ph = dft_forward(phi);
  std::vector<int> neg(static_cast<std::size_t>(g.d));
  cd acc = 0.0;
  enumerate(op.symbol, sups, g.d, [&](cd v, std::span<const int> eta) {
    for (int a = 0; a < g.d; ++a) neg[static_cast<std::size_t>(a)] = -eta[static_cast<std::size_t>(a)];
    acc += v * ph.value_or_zero(neg);
  });
  return acc * std::pow(g.period, g.d);
}

Field apply_separable(const OperatorSpec& op, std::span<const Field> fs) {
  if (op.strategy != Strategy::Separable || !op.expansion)
    throw std::invalid_argument("apply_separable: missing expansion");
  const auto& e = *op.expansion;
  const GridSpec& g = common_grid(fs);
  const int m = op.m();
  if (static_cast<int>(fs.size()) != m || e.m != m || e.d != g.d)
    throw std::invalid_argument("apply_separable: expansion does not match the inputs");
  const auto& part = op.partition;
  const int rank = e.rank();
  const int pad = op.pad_factor > 0 ? op.pad_factor : m;
  const int n_out = padded_size(g.n, pad);

  // h[j] column l: sum_s psi(2^-s xi) g_{l,j}(2^-s xi) f^_j(xi)
  std::vector<Eigen::MatrixXcd> h;
  std::vector<int> xi(static_cast<std::size_t>(g.d));
  Eigen::VectorXd x(g.d);
  for (int j = 0; j < m; ++j) {
    const auto s = dft_forward(fs[static_cast<std::size_t>(j)]);
    const double cmax = s.coeffs.cwiseAbs().maxCoeff();
    Eigen::MatrixXcd hj = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(g.size()), rank);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const cd c = s.coeffs[static_cast<Eigen::Index>(i)];
      if (cmax == 0.0 || std::abs(c) <= 1e-14 * cmax) continue;
      frequency_at(i, g, xi);
      double r2 = 0.0;
      for (int a = 0; a < g.d; ++a) r2 += static_cast<double>(xi[static_cast<std::size_t>(a)]) * xi[static_cast<std::size_t>(a)];
      const double r = std::sqrt(r2);
      if (!part.covers(r))
        throw UncoveredSpectrum("apply_separable: input " + std::to_string(j) +
                                " has an active mode at |xi| = " + std::to_string(r) +
                                " outside the partition");
      for (int sc = part.j_min; sc <= part.j_max; ++sc) {
        const double w = part.weight(sc, r);
        if (w == 0.0) continue;
        for (int a = 0; a < g.d; ++a) x[a] = std::ldexp(static_cast<double>(xi[static_cast<std::size_t>(a)]), -sc);
        hj.row(static_cast<Eigen::Index>(i)) += (w * c) * e.factor_values(j, x).transpose();
      }
    }
    h.push_back(std::move(hj));
  }

  Field out = Field::zeros(g.with_n(n_out));
  for (int l = 0; l < rank; ++l) {
    Eigen::VectorXcd prod = Eigen::VectorXcd::Constant(out.samples.size(), e.coefficients[static_cast<std::size_t>(l)]);
    for (int j = 0; j < m; ++j) {
      const Spectrum sl{g, h[static_cast<std::size_t>(j)].col(l)};
      prod.array() *= dft_inverse(resample(sl, n_out)).samples.array();
    }
    out.samples += prod;
  }
  return out;
}

Field apply_operator(const OperatorSpec& op, std::span<const Field> fs) {
  return op.strategy == Strategy::Direct ? apply_direct(op, fs) : apply_separable(op, fs);
}

void require_alternating(const SymbolSpec& sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const int d = sigma.d, m = sigma.m;
  auto random_tuple = [&] {
    Eigen::MatrixXd xi(d, m);
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = nd(rng);
    return xi;
  };
  for (int probe = 0; probe < 8; ++probe) {
    const Eigen::MatrixXd a = random_tuple(), b = random_tuple();
    double scale = 1.0;
    for (int j = 0; j < m; ++j) scale *= std::max(a.col(j).norm(), b.col(j).norm());
    const double tol = 1e-10 * std::max(scale, 1e-300);
    Eigen::MatrixXd sum = a;
    sum.col(0) += b.col(0);
    Eigen::MatrixXd bb = a;
    bb.col(0) = b.col(0);
    Eigen::MatrixXd twice = a;
    twice.col(0) *= 2.0;
    if (std::abs(sigma(sum) - sigma(a) - sigma(bb)) > 4 * tol ||
        std::abs(sigma(twice) - 2.0 * sigma(a)) > 4 * tol)
      throw std::invalid_argument("symbol " + sigma.id + " is not linear in its first slot");
    for (int j = 1; j < m; ++j) {
      Eigen::MatrixXd rep = a;
      rep.col(j) = a.col(0);
      if (std::abs(sigma(rep)) > tol)
        throw std::invalid_argument("symbol " + sigma.id + " does not vanish on repeated slots");
    }
  }
}

cd pair_with_transfer(const SymbolSpec& sigma, int k, std::span<const Field> fs, const Field& phi) {
  if (k < 0) throw std::invalid_argument("pair_with_transfer: k must be >= 0");
  require_alternating(sigma);
  const GridSpec& g = common_grid(fs);
  const int m = sigma.m;
  const int d = g.d;
  if (static_cast<int>(fs.size()) != m) throw std::invalid_argument("pair_with_transfer: arity mismatch");
  fs[0].require_same_grid(phi);
  const int n_out = padded_size(g.n, m);
  const Field f1 = resample(fs[0], n_out);
  const std::span<const Field> rest = fs.subspan(1);

  std::vector<int> ell(static_cast<std::size_t>(k), 0);
  cd total = 0.0;
  const cd ik = std::pow(cd(0.0, 1.0), k);
  while (true) {
    // Reduced symbol prod_q sigma(e_{l_q}, xi_2, ..., xi_m) on slots 2..m.
    Field g_full;
    if (m == 1) {
      cd c = 1.0;
      for (int q = 0; q < k; ++q) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, 1);
        e(ell[static_cast<std::size_t>(q)], 0) = 1.0;
        c *= sigma(e);
      }
      g_full = c * f1;
    } else {
      SymbolSpec reduced;
      reduced.id = sigma.id + ":reduced";
      reduced.m = m - 1;
      reduced.d = d;
      reduced.evaluate = [sigma, ell, d, m](const Eigen::MatrixXd& tail) {
        Eigen::MatrixXd full(d, m);
        full.rightCols(m - 1) = tail;
        cd v = 1.0;
        for (int l : ell) {
          full.col(0).setZero();
          full(l, 0) = 1.0;
          v *= sigma(full);
        }
        return v;
      };
      const Field t = resample(apply_direct(direct_operator(reduced), rest), n_out);
      g_full = f1;
      g_full.samples.array() *= t.samples.array();
    }
    Field dphi = phi;
    for (int l : ell) dphi = spectral_derivative(dphi, l);
    total += ik * pair(g_full, resample(dphi, n_out));

    int q = k - 1;
    while (q >= 0 && ++ell[static_cast<std::size_t>(q)] == d) {
      ell[static_cast<std::size_t>(q)] = 0;
      --q;
    }
    if (q < 0) break;
  }
  return total;
}

}  // namespace mlab
