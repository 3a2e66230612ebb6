#include "mlab/lp_decomp.hpp"

#include "mlab/field_io.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mlab {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double radial_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth_step(std::log2(r));
}

double dyadic_bump(double r) { return radial_cutoff(r) - radial_cutoff(2.0 * r); }

double annulus_cutoff(double r) { return radial_cutoff(0.5 * r) - radial_cutoff(4.0 * r); }

double DyadicPartition::weight(int j, double r) const { return dyadic_bump(std::ldexp(r, -j)); }

double DyadicPartition::partial_sum(double r) const {
  double s = 0.0;
  for (int j = j_min; j <= j_max; ++j) s += weight(j, r);
  return s;
}

bool DyadicPartition::covers(double r) const {
  return r >= std::ldexp(1.0, j_min) && r <= std::ldexp(1.0, j_max);
}

DyadicPartition build_partition(int j_min, int j_max) {
  if (j_min > j_max) throw std::invalid_argument("build_partition: j_min > j_max");
  return {j_min, j_max};
}

DyadicPartition covering_partition(const GridSpec& grid) {
  const double rmax = std::sqrt(static_cast<double>(grid.d)) * (grid.n / 2);
  return build_partition(0, static_cast<int>(std::ceil(std::log2(rmax))));
}

Field localize(const Field& f, const DyadicPartition& partition, int j) {
  if (j < partition.j_min || j > partition.j_max)
    throw std::invalid_argument("localize: scale outside the partition");
  auto s = dft_forward(f);
  std::vector<int> xi(static_cast<std::size_t>(f.grid.d));
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    frequency_at(i, f.grid, xi);
    double r2 = 0.0;
    for (int c : xi) r2 += static_cast<double>(c) * c;
    s.coeffs[static_cast<Eigen::Index>(i)] *= partition.weight(j, std::sqrt(r2));
  }
  auto out = dft_inverse(s);
  out.real = f.real;
  return out;
}

// ---------------------------------------------------------------------------
// Annulus grid

namespace {

/// Periodic interpolation kernel for N equispaced nodes, N even.
double periodic_sinc(double x, int N) {
  const double half = 0.5 * x;
  const double s = std::sin(half);
  if (std::abs(s) < 1e-14) {
    // x is a multiple of 2 pi: kernel is 1 (or (-1)^N = 1 for even N).
    return 1.0;
  }
  return std::sin(N * half) / (N * std::tan(half));
}

bool power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

}  // namespace

int AnnulusGrid::directions() const {
  switch (d) {
    case 1:
      return 2;
    case 2:
      return angular;
    case 3:
      return angular * (angular / 2);
    default:
      throw std::invalid_argument("AnnulusGrid: d must be 1, 2 or 3");
  }
}

void AnnulusGrid::validate() const {
  if (d < 1 || d > 3) throw std::invalid_argument("AnnulusGrid: d must be 1, 2 or 3");
  if (radial < 4 || radial % 4 != 0 || !power_of_two(radial))
    throw std::invalid_argument("AnnulusGrid: radial must be a power of two >= 4");
  if (d > 1 && (angular < 4 || !power_of_two(angular)))
    throw std::invalid_argument("AnnulusGrid: angular must be a power of two >= 4");
}

double AnnulusGrid::radius(int i) const { return std::exp2(-2.0 + 4.0 * i / radial); }

double AnnulusGrid::radial_weight(int i) const {
  return std::pow(radius(i), d) * std::numbers::ln2 * (4.0 / radial);
}

Eigen::MatrixXd AnnulusGrid::direction_nodes() const {
  const int nd = directions();
  Eigen::MatrixXd u(d, nd);
  if (d == 1) {
    u(0, 0) = 1.0;
    u(0, 1) = -1.0;
  } else if (d == 2) {
    for (int k = 0; k < nd; ++k) {
      const double th = 2.0 * std::numbers::pi * k / angular;
      u(0, k) = std::cos(th);
      u(1, k) = std::sin(th);
    }
  } else {
    const int np = angular / 2;
    for (int p = 0; p < np; ++p) {
      const double th = (p + 0.5) * std::numbers::pi / np;
      for (int q = 0; q < angular; ++q) {
        const double ph = 2.0 * std::numbers::pi * q / angular;
        const int k = p * angular + q;
        u(0, k) = std::sin(th) * std::cos(ph);
        u(1, k) = std::sin(th) * std::sin(ph);
        u(2, k) = std::cos(th);
      }
    }
  }
  return u;
}

Eigen::VectorXd AnnulusGrid::direction_weights() const {
  const int nd = directions();
  Eigen::VectorXd w(nd);
  if (d == 1) {
    w.setOnes();
  } else if (d == 2) {
    w.setConstant(2.0 * std::numbers::pi / angular);
  } else {
    const int np = angular / 2;
    for (int p = 0; p < np; ++p) {
      // Exact integral of sin over the polar cell around th.
      const double th = (p + 0.5) * std::numbers::pi / np;
      const double band = 2.0 * std::sin(th) * std::sin(0.5 * std::numbers::pi / np);
      for (int q = 0; q < angular; ++q)
        w[p * angular + q] = band * (2.0 * std::numbers::pi / angular);
    }
  }
  return w;
}

Eigen::VectorXd AnnulusGrid::direction_interpolation(const Eigen::VectorXd& u) const {
  const int nd = directions();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nd);
  if (d == 1) {
    w[u[0] >= 0.0 ? 0 : 1] = 1.0;
    return w;
  }
  if (d == 2) {
    const double th = std::atan2(u[1], u[0]);
    for (int k = 0; k < angular; ++k)
      w[k] = periodic_sinc(th - 2.0 * std::numbers::pi * k / angular, angular);
    return w;
  }
  // d = 3: the meridian through the point, continued over the pole at
  // azimuth + pi, is a periodic sequence of 2 * np samples in the polar angle.
  const int np = angular / 2;
  const double th = std::acos(std::clamp(u[2] / u.norm(), -1.0, 1.0));
  const double ph = std::atan2(u[1], u[0]);
  Eigen::VectorXd az0(angular), az1(angular);
  for (int q = 0; q < angular; ++q) {
    const double node = 2.0 * std::numbers::pi * q / angular;
    az0[q] = periodic_sinc(ph - node, angular);
    az1[q] = periodic_sinc(ph + std::numbers::pi - node, angular);
  }
  const int nseq = 2 * np;
  for (int kk = 0; kk < nseq; ++kk) {
    const double node = (kk + 0.5) * std::numbers::pi / np;
    const double wp = periodic_sinc(th - node, nseq);
    if (wp == 0.0) continue;
    const int p = kk < np ? kk : nseq - 1 - kk;
    const auto& az = kk < np ? az0 : az1;
    w.segment(p * angular, angular) += wp * az;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Expansion

Eigen::VectorXcd SeparableExpansion::factor_values(int slot, const Eigen::VectorXd& x) const {
  const double r = x.norm();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(rank());
  if (r == 0.0) return out;
  const int nd = grid.directions();
  const Eigen::VectorXd wa = grid.direction_interpolation(x / r);

  const double u = (std::log2(r) + 2.0) * grid.radial / 4.0;
  int i0 = static_cast<int>(std::floor(u));
  double t = u - i0;
  if (i0 < 0) {
    i0 = 0;
    t = 0.0;
  }
  if (i0 >= grid.radial - 1) {
    i0 = grid.radial - 1;
    t = 0.0;
  }
  for (int l = 0; l < rank(); ++l) {
    const auto& table = factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(slot)];
    cd v = (1.0 - t) * (table.segment(i0 * nd, nd).transpose() * wa.cast<cd>())(0);
    if (t > 0.0) v += t * (table.segment((i0 + 1) * nd, nd).transpose() * wa.cast<cd>())(0);
    out[l] = v;
  }
  return out;
}

cd SeparableExpansion::evaluate(const Eigen::MatrixXd& x) const {
  Eigen::VectorXcd acc = Eigen::Map<const Eigen::VectorXcd>(coefficients.data(), rank());
  for (int j = 0; j < m; ++j) acc.array() *= factor_values(j, x.col(j)).array();
  return acc.sum();
}

namespace {

struct RadialProfile {
  Eigen::VectorXd phi;  ///< phi(r_i)
  double norm = 0.0;    ///< sqrt(sum_i w_i phi_i^2)
};

RadialProfile radial_profile(const AnnulusGrid& g) {
  RadialProfile p;
  p.phi.resize(g.radial);
  double s = 0.0;
  for (int i = 0; i < g.radial; ++i) {
    p.phi[i] = annulus_cutoff(g.radius(i));
    s += g.radial_weight(i) * p.phi[i] * p.phi[i];
  }
  p.norm = std::sqrt(s);
  return p;
}

Eigen::VectorXcd factor_table(const AnnulusGrid& g, const RadialProfile& rp,
                              const Eigen::VectorXcd& angular_vec, const Eigen::VectorXd& sqrt_wa) {
  const int nd = g.directions();
  Eigen::VectorXcd t(g.points());
  for (int i = 0; i < g.radial; ++i)
    t.segment(i * nd, nd) = (rp.phi[i] / rp.norm) * angular_vec.cwiseQuotient(sqrt_wa.cast<cd>());
  return t;
}

double tail_residual(const std::vector<double>& s, std::size_t kept) {
  double total = 0.0, tail = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) {
    total += s[l] * s[l];
    if (l >= kept) tail += s[l] * s[l];
  }
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

/// Dense angular tensor, slot 0 slowest, entries sigma(u_k1..u_km) sqrt(w_k1..w_km).
Eigen::VectorXcd angular_tensor(const SymbolSpec& sigma, const Eigen::MatrixXd& dirs,
                                const Eigen::VectorXd& sqrt_wa) {
  const int nd = static_cast<int>(dirs.cols());
  const int m = sigma.m;
  std::size_t total = 1;
  for (int j = 0; j < m; ++j) total *= static_cast<std::size_t>(nd);
  Eigen::VectorXcd t(static_cast<Eigen::Index>(total));
  std::vector<int> k(static_cast<std::size_t>(m), 0);
  Eigen::MatrixXd xi(sigma.d, m);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    double w = 1.0;
    for (int j = m - 1; j >= 0; --j) {
      k[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(nd));
      rem /= static_cast<std::size_t>(nd);
    }
    for (int j = 0; j < m; ++j) {
      xi.col(j) = dirs.col(k[static_cast<std::size_t>(j)]);
      w *= sqrt_wa[k[static_cast<std::size_t>(j)]];
    }
    t[static_cast<Eigen::Index>(idx)] = sigma(xi) * w;
  }
  return t;
}

/// Contracts tensor T (m slots of size nd) with conj(u_i) for every i != slot.
Eigen::VectorXcd contract_except(const Eigen::VectorXcd& T, int m, int nd,
                                 const std::vector<Eigen::VectorXcd>& u, int slot) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(nd);
  std::vector<int> k(static_cast<std::size_t>(m), 0);
  for (Eigen::Index idx = 0; idx < T.size(); ++idx) {
    Eigen::Index rem = idx;
    for (int j = m - 1; j >= 0; --j) {
      k[static_cast<std::size_t>(j)] = static_cast<int>(rem % nd);
      rem /= nd;
    }
    cd w = T[idx];
    for (int j = 0; j < m; ++j)
      if (j != slot) w *= std::conj(u[static_cast<std::size_t>(j)][k[static_cast<std::size_t>(j)]]);
    out[k[static_cast<std::size_t>(slot)]] += w;
  }
  return out;
}

/// Dominant left singular vector of the mode-`slot` unfolding.
Eigen::VectorXcd dominant_mode_vector(const Eigen::VectorXcd& T, int m, int nd, int slot) {
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(nd, nd);
  const Eigen::Index block = T.size() / nd;
  Eigen::MatrixXcd unfold(nd, block);
  std::vector<int> k(static_cast<std::size_t>(m), 0);
  std::vector<Eigen::Index> fill(static_cast<std::size_t>(nd), 0);
  for (Eigen::Index idx = 0; idx < T.size(); ++idx) {
    Eigen::Index rem = idx;
    for (int j = m - 1; j >= 0; --j) {
      k[static_cast<std::size_t>(j)] = static_cast<int>(rem % nd);
      rem /= nd;
    }
    const int row = k[static_cast<std::size_t>(slot)];
    unfold(row, fill[static_cast<std::size_t>(row)]++) = T[idx];
  }
  gram = unfold * unfold.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  return es.eigenvectors().col(nd - 1);
}

void subtract_rank_one(Eigen::VectorXcd& T, int m, int nd, cd c,
                       const std::vector<Eigen::VectorXcd>& u) {
  std::vector<int> k(static_cast<std::size_t>(m), 0);
  for (Eigen::Index idx = 0; idx < T.size(); ++idx) {
    Eigen::Index rem = idx;
    for (int j = m - 1; j >= 0; --j) {
      k[static_cast<std::size_t>(j)] = static_cast<int>(rem % nd);
      rem /= nd;
    }
    cd v = c;
    for (int j = 0; j < m; ++j) v *= u[static_cast<std::size_t>(j)][k[static_cast<std::size_t>(j)]];
    T[idx] -= v;
  }
}

template <typename Matrix>
void expand_two_slot(const Matrix& B, int rank, const AnnulusGrid& g, const RadialProfile& rp,
                     const Eigen::VectorXd& sqrt_wa, SeparableExpansion& e) {
  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = rp.norm * rp.norm;
  e.spectrum.resize(static_cast<std::size_t>(s.size()));
  for (Eigen::Index l = 0; l < s.size(); ++l) e.spectrum[static_cast<std::size_t>(l)] = scale * s[l];
  const int r = std::min<int>(rank, static_cast<int>(s.size()));
  e.residual = tail_residual(e.spectrum, static_cast<std::size_t>(r));
  for (int l = 0; l < r; ++l) {
    e.coefficients.push_back(scale * s[l]);
    Eigen::VectorXcd left = svd.matrixU().col(l).template cast<cd>();
    Eigen::VectorXcd right = svd.matrixV().col(l).template cast<cd>().conjugate();
    e.factors.push_back({factor_table(g, rp, left, sqrt_wa), factor_table(g, rp, right, sqrt_wa)});
  }
}

}  // namespace

SeparableExpansion separable_expand(const SymbolSpec& sigma, const AnnulusGrid& grid, int rank) {
  if (!sigma.flags.poly_homogeneous)
    throw std::invalid_argument("separable_expand: symbol must be poly-homogeneous");
  if (rank < 1) throw std::invalid_argument("separable_expand: rank must be >= 1");
  if (sigma.m < 2) throw std::invalid_argument("separable_expand: arity must be >= 2");
  if (grid.d != sigma.d) throw std::invalid_argument("separable_expand: dimension mismatch");
  grid.validate();

  SeparableExpansion e;
  e.m = sigma.m;
  e.d = sigma.d;
  e.grid = grid;

  // A degree-0 poly-homogeneous symbol does not see the radii, so the
  // weighted annulus tensor is (radial cutoff)^{(x) m} (x) (angular tensor)
  // and its singular structure is that of the angular tensor scaled by
  // |phi|^m.
  const RadialProfile rp = radial_profile(grid);
  const Eigen::MatrixXd dirs = grid.direction_nodes();
  const Eigen::VectorXd sqrt_wa = grid.direction_weights().cwiseSqrt();
  const int nd = grid.directions();
  const Eigen::VectorXcd T = angular_tensor(sigma, dirs, sqrt_wa);

  if (sigma.m == 2) {
    const Eigen::MatrixXcd B = Eigen::Map<const Eigen::MatrixXcd>(T.data(), nd, nd).transpose();
    if (B.imag().cwiseAbs().maxCoeff() == 0.0)
      expand_two_slot<Eigen::MatrixXd>(B.real(), rank, grid, rp, sqrt_wa, e);
    else
      expand_two_slot<Eigen::MatrixXcd>(B, rank, grid, rp, sqrt_wa, e);
    return e;
  }

  constexpr int kSweeps = 200;
  const int m = sigma.m;
  const double scale = std::pow(rp.norm, m);
  const double total_norm = T.norm();
  int max_rank = 1;
  for (int j = 1; j < m; ++j) max_rank *= nd;
  const int r = std::min(rank, max_rank);

  Eigen::VectorXcd R = T;
  struct Term {
    cd c;
    std::vector<Eigen::VectorXcd> u;
  };
  std::vector<Term> terms;
  for (int l = 0; l < r; ++l) {
    if (R.norm() <= 1e-15 * total_norm) break;
    std::vector<Eigen::VectorXcd> u(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) u[static_cast<std::size_t>(j)] = dominant_mode_vector(R, m, nd, j);
    for (int sweep = 0; sweep < kSweeps; ++sweep) {
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd v = contract_except(R, m, nd, u, j);
        const double nv = v.norm();
        if (nv == 0.0) break;
        u[static_cast<std::size_t>(j)] = v / nv;
      }
    }
    // dot() conjugates its first argument: c = sum conj(u0) * v.
    const cd c = u[0].dot(contract_except(R, m, nd, u, 0));
    subtract_rank_one(R, m, nd, c, u);
    terms.push_back({c, u});
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return std::abs(a.c) > std::abs(b.c); });
  e.residual = total_norm > 0.0 ? R.norm() / total_norm : 0.0;
  for (const auto& t : terms) {
    e.spectrum.push_back(scale * std::abs(t.c));
    e.coefficients.push_back(scale * t.c);
    std::vector<Eigen::VectorXcd> tabs;
    for (int j = 0; j < m; ++j) tabs.push_back(factor_table(grid, rp, t.u[static_cast<std::size_t>(j)], sqrt_wa));
    e.factors.push_back(std::move(tabs));
  }
  return e;
}

SeparableExpansion separable_expand(const SymbolSpec& sigma, int annulus_points, int rank) {
  AnnulusGrid g;
  g.d = sigma.d;
  g.angular = annulus_points;
  g.radial = std::max(4, annulus_points / 2);
  return separable_expand(sigma, g, rank);
}

// ---------------------------------------------------------------------------

void save_expansion(const std::filesystem::path& prefix, const SeparableExpansion& e) {
  nlohmann::json h;
  h["format"] = "mlab-separable-expansion";
  h["m"] = e.m;
  h["d"] = e.d;
  h["grid"] = {{"radial", e.grid.radial}, {"angular", e.grid.angular}, {"directions", e.grid.directions()}};
  h["rank"] = e.rank();
  h["residual"] = e.residual;
  h["spectrum"] = e.spectrum;
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : e.coefficients) coeffs.push_back({c.real(), c.imag()});
  h["coefficients"] = coeffs;
  h["tables"] = prefix.filename().string() + ".fld";
  h["table_order"] = "term-major, slot-minor; each table radial-major over directions";

  std::ofstream js(prefix.string() + ".json");
  if (!js) throw std::runtime_error("cannot write " + prefix.string() + ".json");
  js << h.dump(2) << '\n';

  std::ofstream bin(prefix.string() + ".fld", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + prefix.string() + ".fld");
  const GridSpec g{1, e.grid.points(), 1.0};
  for (const auto& term : e.factors)
    for (const auto& table : term) write_field(bin, Field(g, table));
}

SeparableExpansion load_expansion(const std::filesystem::path& prefix) {
  std::ifstream js(prefix.string() + ".json");
  if (!js) throw std::runtime_error("cannot read " + prefix.string() + ".json");
  const auto h = nlohmann::json::parse(js);
  SeparableExpansion e;
  e.m = h.at("m");
  e.d = h.at("d");
  e.grid.d = e.d;
  e.grid.radial = h.at("grid").at("radial");
  e.grid.angular = h.at("grid").at("angular");
  e.residual = h.at("residual");
  e.spectrum = h.at("spectrum").get<std::vector<double>>();
  for (const auto& c : h.at("coefficients")) e.coefficients.emplace_back(c.at(0), c.at(1));

  std::ifstream bin(prefix.string() + ".fld", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + prefix.string() + ".fld");
  const auto tables = read_fields(bin);
  if (tables.size() != e.coefficients.size() * static_cast<std::size_t>(e.m))
    throw std::runtime_error("expansion tables do not match header");
  std::size_t t = 0;
  for (int l = 0; l < e.rank(); ++l) {
    std::vector<Eigen::VectorXcd> slots;
    for (int j = 0; j < e.m; ++j) slots.push_back(tables[t++].samples);
    e.factors.push_back(std::move(slots));
  }
  return e;
}

}  // namespace mlab
