#include "mlab/symbols.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mlab {
namespace {

int permutation_sign(const std::vector<int>& p) {
  int inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 ? -1 : 1;
}

double column_norms_product(const Eigen::MatrixXd& xi) {
  double p = 1.0;
  for (Eigen::Index j = 0; j < xi.cols(); ++j) p *= xi.col(j).norm();
  return p;
}

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

double small_determinant(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  if (d != a.cols()) throw std::invalid_argument("small_determinant: not square");
  switch (d) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    case 4: {
      std::vector<int> p(4);
      std::iota(p.begin(), p.end(), 0);
      double s = 0.0;
      do {
        s += permutation_sign(p) * a(p[0], 0) * a(p[1], 1) * a(p[2], 2) * a(p[3], 3);
      } while (std::next_permutation(p.begin(), p.end()));
      return s;
    }
    default:
      return a.partialPivLu().determinant();
  }
}

SymbolSpec one_symbol(int m, int d) {
  SymbolSpec s;
  s.id = "one";
  s.m = m;
  s.d = d;
  s.evaluate = [](const Eigen::MatrixXd&) { return cd(1.0); };
  s.flags.poly_homogeneous = true;
  s.flags.product_form = true;
  return s;
}

SymbolSpec det_symbol(int d) {
  if (d < 2) throw std::invalid_argument("det_symbol: d must be >= 2");
  SymbolSpec s;
  s.id = "det";
  s.m = d;
  s.d = d;
  s.evaluate = [](const Eigen::MatrixXd& xi) { return cd(small_determinant(xi)); };
  s.flags.multilinear = true;
  s.flags.alternating = true;
  s.flags.alternating_power = 1;
  return s;
}

SymbolSpec minor_symbol(int d, std::vector<int> axes) {
  const int m = static_cast<int>(axes.size());
  if (m < 2 || m > d) throw std::invalid_argument("minor_symbol: need 2 <= m <= d");
  for (int a : axes)
    if (a < 0 || a >= d) throw std::invalid_argument("minor_symbol: axis out of range");
  SymbolSpec s;
  s.id = "minor";
  s.m = m;
  s.d = d;
  s.evaluate = [axes, m](const Eigen::MatrixXd& xi) {
    Eigen::MatrixXd sub(m, m);
    for (int r = 0; r < m; ++r) sub.row(r) = xi.row(axes[static_cast<std::size_t>(r)]);
    return cd(small_determinant(sub));
  };
  s.flags.multilinear = true;
  s.flags.alternating = true;
  s.flags.alternating_power = 1;
  return s;
}

SymbolSpec dot_symbol(int d) {
  SymbolSpec s;
  s.id = "dot";
  s.m = 2;
  s.d = d;
  s.evaluate = [](const Eigen::MatrixXd& xi) { return cd(xi.col(0).dot(xi.col(1))); };
  s.flags.multilinear = true;
  return s;
}

SymbolSpec power_symbol(const SymbolSpec& base, int k) {
  if (k < 0) throw std::invalid_argument("power_symbol: k must be >= 0");
  SymbolSpec s;
  s.id = base.id + "^" + std::to_string(k);
  s.m = base.m;
  s.d = base.d;
  auto b = base.evaluate;
  s.evaluate = [b, k](const Eigen::MatrixXd& xi) {
    const cd v = b(xi);
    cd r = 1.0;
    for (int i = 0; i < k; ++i) r *= v;
    return r;
  };
  s.flags.multilinear = base.flags.multilinear && k == 1;
  s.flags.alternating = base.flags.alternating && k == 1;
  s.flags.alternating_power = base.flags.alternating ? k : 0;
  s.flags.poly_homogeneous = base.flags.poly_homogeneous;
  s.zero_rule = base.zero_rule;
  return s;
}

SymbolSpec normalized_power_symbol(const SymbolSpec& base, double beta, PowerKind kind) {
  if (!(beta > 0.0)) throw std::invalid_argument("normalized_power_symbol: beta must be > 0");
  if (kind == PowerKind::Auto) kind = is_integer(beta) ? PowerKind::Signed : PowerKind::Absolute;
  if (kind == PowerKind::Signed && !is_integer(beta))
    throw std::invalid_argument("normalized_power_symbol: signed variant needs integer power");
  SymbolSpec s;
  s.m = base.m;
  s.d = base.d;
  auto b = base.evaluate;
  if (kind == PowerKind::Signed) {
    const int k = static_cast<int>(std::lround(beta));
    s.id = base.id + "_norm^" + std::to_string(k);
    s.evaluate = [b, k](const Eigen::MatrixXd& xi) {
      const cd v = b(xi) / column_norms_product(xi);
      cd r = 1.0;
      for (int i = 0; i < k; ++i) r *= v;
      return r;
    };
  } else {
    s.id = base.id + "_abs_norm^" + format_number(beta);
    s.evaluate = [b, beta](const Eigen::MatrixXd& xi) {
      return cd(std::pow(std::abs(b(xi)) / column_norms_product(xi), beta));
    };
  }
  s.flags.poly_homogeneous = true;
  s.zero_rule = ZeroRule::Zero;
  return s;
}

SymbolSpec riesz_symbol(int d, int axis) {
  if (axis < 0 || axis >= d) throw std::invalid_argument("riesz_symbol: axis out of range");
  SymbolSpec s;
  s.id = "riesz" + std::to_string(axis + 1);
  s.m = 1;
  s.d = d;
  s.evaluate = [axis](const Eigen::MatrixXd& xi) { return cd(xi(axis, 0) / xi.col(0).norm()); };
  s.flags.poly_homogeneous = true;
  s.flags.product_form = true;
  s.zero_rule = ZeroRule::Zero;
  return s;
}

SymbolSpec product_symbol(const std::vector<SymbolSpec>& factors) {
  if (factors.empty()) throw std::invalid_argument("product_symbol: no factors");
  const int d = factors.front().d;
  bool homogeneous = true;
  bool zero_rule = false;
  std::vector<SymbolSpec::Evaluator> evals;
  std::string id = "product(";
  for (const auto& f : factors) {
    if (f.m != 1) throw std::invalid_argument("product_symbol: factors must have arity 1");
    if (f.d != d) throw std::invalid_argument("product_symbol: dimension mismatch");
    homogeneous = homogeneous && f.flags.poly_homogeneous;
    zero_rule = zero_rule || f.zero_rule == ZeroRule::Zero;
    evals.push_back(f.evaluate);
    id += (evals.size() > 1 ? "," : "") + f.id;
  }
  SymbolSpec s;
  s.id = id + ")";
  s.m = static_cast<int>(factors.size());
  s.d = d;
  s.evaluate = [evals](const Eigen::MatrixXd& xi) {
    cd r = 1.0;
    Eigen::MatrixXd col(xi.rows(), 1);
    for (std::size_t j = 0; j < evals.size(); ++j) {
      col = xi.col(static_cast<Eigen::Index>(j));
      r *= evals[j](col);
    }
    return r;
  };
  s.flags.poly_homogeneous = homogeneous;
  s.flags.product_form = true;
  s.zero_rule = zero_rule ? ZeroRule::Zero : ZeroRule::Evaluate;
  return s;
}

SymbolSpec symbol_from_id(const std::string& id, int d, int m) {
  const auto colon = id.find(':');
  const std::string name = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  auto number = [&]() {
    if (arg.empty()) throw std::invalid_argument("symbol '" + id + "' needs a parameter");
    std::size_t pos = 0;
    const double v = std::stod(arg, &pos);
    if (pos != arg.size()) throw std::invalid_argument("bad symbol parameter in '" + id + "'");
    return v;
  };
  SymbolSpec s;
  if (name == "one") {
    s = one_symbol(m, d);
  } else if (name == "det") {
    s = det_symbol(d);
  } else if (name == "det_pow") {
    const double k = number();
    if (!is_integer(k) || k < 0) throw std::invalid_argument("det_pow needs integer k >= 0");
    s = power_symbol(det_symbol(d), static_cast<int>(k));
  } else if (name == "det_norm") {
    s = normalized_power_symbol(det_symbol(d), number());
  } else if (name == "dot_norm") {
    s = normalized_power_symbol(dot_symbol(d), number());
  } else if (name == "riesz_product") {
    std::vector<SymbolSpec> factors;
    for (const auto& tok : split(arg, ',')) {
      const int j = std::stoi(tok);
      factors.push_back(riesz_symbol(d, j - 1));
    }
    s = product_symbol(factors);
  } else {
    throw std::invalid_argument("unknown symbol id '" + id + "'");
  }
  s.id = id;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd random_direction(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(d);
  do {
    for (int a = 0; a < d; ++a) v[a] = g(rng);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

/// All multi-indices of length `len` with total order <= max_order.
std::vector<std::vector<int>> multi_indices(int len, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(len), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == len) {
      out.push_back(cur);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      cur[static_cast<std::size_t>(pos)] = a;
      rec(pos + 1, left - a);
    }
    cur[static_cast<std::size_t>(pos)] = 0;
  };
  rec(0, max_order);
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Central-difference estimate of d^alpha sigma at xi with per-coordinate
/// steps h (flattened column-major over the d x m matrix).
cd finite_difference(const SymbolSpec& sigma, const Eigen::MatrixXd& xi,
                     const std::vector<int>& alpha, const Eigen::VectorXd& h) {
  std::vector<int> active;
  for (std::size_t c = 0; c < alpha.size(); ++c)
    if (alpha[c] > 0) active.push_back(static_cast<int>(c));
  if (active.empty()) return sigma(xi);

  std::vector<int> q(active.size(), 0);
  Eigen::MatrixXd pt(xi.rows(), xi.cols());
  cd acc = 0.0;
  while (true) {
    pt = xi;
    double w = 1.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const int c = active[i];
      const int a = alpha[static_cast<std::size_t>(c)];
      const double hc = h[c];
      pt.data()[c] += (0.5 * a - q[i]) * hc;
      w *= ((q[i] % 2) ? -1.0 : 1.0) * binomial(a, q[i]) / std::pow(hc, a);
    }
    acc += w * sigma(pt);
    std::size_t i = 0;
    for (; i < active.size(); ++i) {
      if (++q[i] <= alpha[static_cast<std::size_t>(active[i])]) break;
      q[i] = 0;
    }
    if (i == active.size()) break;
  }
  return acc;
}

double ratio_of(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0) return 1.0;
  if (*lo == 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ConditionReport check_poly_homogeneity(const SymbolSpec& sigma, int samples, std::uint64_t seed,
                                       double threshold) {
  if (samples < 1) throw std::invalid_argument("check_poly_homogeneity: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.25, 4.0);
  std::uniform_int_distribution<int> power(-4, 4);
  ConditionReport rep;
  rep.condition = "poly_homogeneous";
  rep.sample_description = std::to_string(samples) +
                           " random nonzero tuples, per-slot scales 2^-4..2^4";
  rep.samples = static_cast<std::size_t>(samples);
  rep.threshold = threshold;
  Eigen::MatrixXd xi(sigma.d, sigma.m), scaled(sigma.d, sigma.m);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < sigma.m; ++j) {
      xi.col(j) = radius(rng) * random_direction(sigma.d, rng);
      scaled.col(j) = std::ldexp(1.0, power(rng)) * xi.col(j);
    }
    worst = std::max(worst, std::abs(sigma(scaled) - sigma(xi)));
  }
  rep.worst_ratio = worst;
  rep.per_scale = {worst};
  rep.pass = std::isfinite(worst) && worst <= threshold;
  return rep;
}

ConditionReport check_derivative_conditions(const SymbolSpec& sigma, DerivativeWeight which,
                                            int max_order, int samples, std::uint64_t seed,
                                            double threshold) {
  if (max_order < 1) throw std::invalid_argument("check_derivative_conditions: max_order >= 1");
  constexpr int kScaleMin = -2, kScaleCount = 6;
  constexpr double kStepFraction = 1.0 / 64.0;
  const int m = sigma.m, d = sigma.d;
  const auto alphas = multi_indices(m * d, max_order);

  ConditionReport rep;
  rep.condition = which == DerivativeWeight::CM ? "CM" : "PRODUCT";
  rep.sample_description = std::to_string(samples) + " tuples x 6 dyadic scales 2^-2..2^3";
  rep.threshold = threshold;
  rep.per_scale.assign(kScaleCount, 0.0);
  rep.constants.reserve(alphas.size());
  for (const auto& a : alphas) rep.constants.push_back({a, 0.0});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_radius(-4.0, 1.0);
  Eigen::MatrixXd base(d, m), xi(d, m);
  Eigen::VectorXd h(m * d);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < m; ++j)
      base.col(j) = std::exp2(log_radius(rng)) * random_direction(d, rng);
    for (int sc = 0; sc < kScaleCount; ++sc) {
      xi = std::ldexp(1.0, kScaleMin + sc) * base;
      double total = 0.0;
      for (int j = 0; j < m; ++j) total += xi.col(j).norm();
      bool degenerate = false;
      for (int j = 0; j < m; ++j) {
        const double step = which == DerivativeWeight::CM ? kStepFraction * total
                                                          : kStepFraction * xi.col(j).norm();
        if (xi.col(j).norm() < step || step == 0.0) degenerate = true;
        h.segment(j * d, d).setConstant(step);
      }
      if (degenerate) {
        ++rep.skipped;
        continue;
      }
      ++rep.samples;
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const auto& alpha = alphas[ai];
        double weight = 1.0;
        if (which == DerivativeWeight::CM) {
          const int order = std::accumulate(alpha.begin(), alpha.end(), 0);
          weight = std::pow(total, order);
        } else {
          for (int j = 0; j < m; ++j) {
            int order_j = 0;
            for (int a = 0; a < d; ++a) order_j += alpha[static_cast<std::size_t>(j * d + a)];
            weight *= std::pow(xi.col(j).norm(), order_j);
          }
        }
        const double v = std::abs(finite_difference(sigma, xi, alpha, h)) * weight;
        rep.constants[ai].constant = std::max(rep.constants[ai].constant, v);
        rep.per_scale[static_cast<std::size_t>(sc)] =
            std::max(rep.per_scale[static_cast<std::size_t>(sc)], v);
      }
    }
  }
  rep.worst_ratio = ratio_of(rep.per_scale);
  rep.pass = rep.samples > 0 && all_finite(rep.per_scale) && rep.worst_ratio <= threshold;
  return rep;
}

ConditionReport check_hormander_annulus(const SymbolSpec& a, int smoothness_order,
                                        const std::vector<double>& R_list, int points_per_axis,
                                        double threshold) {
  if (R_list.empty()) throw std::invalid_argument("check_hormander_annulus: empty R list");
  for (double R : R_list)
    if (!(R > 0.0)) throw std::invalid_argument("check_hormander_annulus: R must be positive");
  const int dim = a.m * a.d;
  const double h = 4.0 / points_per_axis;
  const auto alphas = multi_indices(dim, smoothness_order);

  // Cell-centred points of [-2, 2]^dim inside the annulus 1 <= |zeta| <= 2.
  std::vector<Eigen::VectorXd> points;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    Eigen::VectorXd z(dim);
    for (int c = 0; c < dim; ++c) z[c] = -2.0 + (idx[static_cast<std::size_t>(c)] + 0.5) * h;
    const double r = z.norm();
    if (r >= 1.0 && r <= 2.0) points.push_back(z);
    int c = 0;
    for (; c < dim; ++c) {
      if (++idx[static_cast<std::size_t>(c)] < points_per_axis) break;
      idx[static_cast<std::size_t>(c)] = 0;
    }
    if (c == dim) break;
  }
  const double cell = std::pow(h, dim);

  ConditionReport rep;
  rep.condition = "CM-G";
  rep.sample_description = std::to_string(points.size()) + " annulus points, h=" +
                           format_number(h) + ", order " + std::to_string(smoothness_order);
  rep.samples = points.size();
  rep.threshold = threshold;
  rep.constants.reserve(alphas.size());
  for (const auto& al : alphas) rep.constants.push_back({al, 0.0});

  SymbolSpec scaled = a;
  Eigen::MatrixXd xi(a.d, a.m);
  Eigen::VectorXd steps = Eigen::VectorXd::Constant(dim, h);
  for (double R : R_list) {
    scaled.evaluate = [&a, R](const Eigen::MatrixXd& x) { return a(R * x); };
    scaled.zero_rule = ZeroRule::Evaluate;
    double norm2 = 0.0;
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      double part = 0.0;
      for (const auto& z : points) {
        xi = Eigen::Map<const Eigen::MatrixXd>(z.data(), a.d, a.m);
        part += std::norm(finite_difference(scaled, xi, alphas[ai], steps));
      }
      rep.constants[ai].constant = std::max(rep.constants[ai].constant, std::sqrt(part * cell));
      norm2 += part * cell;
    }
    rep.per_scale.push_back(std::sqrt(norm2));
  }
  rep.worst_ratio = ratio_of(rep.per_scale);
  rep.pass = all_finite(rep.per_scale) && rep.worst_ratio <= threshold;
  return rep;
}

}  // namespace mlab
