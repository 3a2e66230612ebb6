#include "mlab/multilinear_op.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <memory>

using namespace mlab;
using mlab::testing::naive_multiplier;
using mlab::testing::rel_l2;
using mlab::testing::trig_field;

namespace {

/// Complex field with every coefficient active, Nyquist included.
Field full_band(std::mt19937_64& rng, const GridSpec& g) {
  std::normal_distribution<double> N;
  ComplexVector<double> s(static_cast<Eigen::Index>(g.size()));
  for (auto& v : s) v = cd(N(rng), N(rng));
  return Field(g, s);
}

}  // namespace

TEST_CASE("symbol one gives the pointwise product") {
  std::mt19937_64 rng(1);
  for (int d : {1, 2})
    for (int m : {2, 3})
      for (int n : {8, 16}) {
        const GridSpec g{d, n};
        std::vector<Field> fs;
        for (int j = 0; j < m; ++j) fs.push_back(full_band(rng, g));
        const Field out = apply_direct(direct_operator(one_symbol(m, d)), fs);
        CHECK(out.grid.n == padded_size(n, m));
        CHECK(rel_l2(out, product_on_grid<double>(fs, out.grid.n)) <= 1e-12);
        CHECK(rel_l2(resample(out, n), dealiased_product<double>(fs, m)) <= 1e-12);
      }
}

TEST_CASE("apply_direct agrees with the full-lattice oracle") {
  std::mt19937_64 rng(2);
  struct Case {
    std::string id;
    int d, m, n;
  };
  for (const Case& c : {Case{"det", 2, 2, 8}, Case{"det_norm:1", 2, 2, 8}, Case{"det_norm:1.5", 2, 2, 4},
                        Case{"riesz_product:1,1,1", 1, 3, 8}, Case{"dot_norm:2", 2, 2, 4}}) {
    CAPTURE(c.id);
    const GridSpec g{c.d, c.n, 3.0};
    const auto sigma = symbol_from_id(c.id, c.d, c.m);
    std::vector<Field> fs;
    for (int j = 0; j < c.m; ++j) fs.push_back(full_band(rng, g));
    const Field fast = apply_direct(direct_operator(sigma), fs);
    const Field oracle = naive_multiplier(sigma, fs, fast.grid.n);
    CHECK(rel_l2(fast, oracle) <= 1e-11);
  }
}

TEST_CASE("property: multilinearity and slot symmetry of T") {
  std::mt19937_64 rng(3);
  const GridSpec g{2, 8};
  const auto op = direct_operator(det_symbol(2));
  for (int i = 0; i < 5; ++i) {
    const Field a = full_band(rng, g), b = full_band(rng, g), c = full_band(rng, g);
    const cd lambda(0.3, -1.2);
    const std::vector<Field> lhs{a + lambda * b, c};
    const Field sum = apply_direct(op, std::vector<Field>{a, c}) + lambda * apply_direct(op, std::vector<Field>{b, c});
    CHECK(rel_l2(apply_direct(op, lhs), sum) <= 1e-12);
    // Alternating symbol: swapping inputs flips the sign, equal inputs give 0.
    const Field ac = apply_direct(op, std::vector<Field>{a, c}), ca = apply_direct(op, std::vector<Field>{c, a});
    CHECK((ac.samples + ca.samples).norm() <= 1e-12 * ac.samples.norm());
    CHECK(apply_direct(op, std::vector<Field>{a, a}).samples.norm() <= 1e-12 * ac.samples.norm());
  }
}

TEST_CASE("pair_direct equals the quadrature pairing of the output") {
  std::mt19937_64 rng(4);
  const GridSpec g{2, 8, 2.5};
  const auto op = direct_operator(symbol_from_id("det_norm:1", 2));
  const std::vector<Field> fs{full_band(rng, g), full_band(rng, g)};
  const Field out = apply_direct(op, fs);
  const Field phi = full_band(rng, g);
  const cd expect = pair(out, resample(phi, out.grid.n));
  CHECK(std::abs(pair_direct(op, fs, phi) - expect) <= 1e-11 * std::abs(expect));
}

TEST_CASE("dilation option matches explicitly dilated inputs") {
  std::mt19937_64 rng(5);
  const GridSpec g{2, 8};
  const auto op = direct_operator(det_symbol(2));
  const std::vector<Field> fs{trig_field(rng, g, 3), trig_field(rng, g, 3)};
  const Field phi = trig_field(rng, g.with_n(32), 12);
  for (int t = 1; t <= 2; ++t) {
    const std::vector<Field> big{dilate_dyadic(fs[0], t, DilationGrid::Scale), dilate_dyadic(fs[1], t, DilationGrid::Scale)};
    DirectOptions opts;
    opts.dilation = t;
    const Field a = apply_direct(op, fs, opts), b = apply_direct(op, big);
    CHECK(a.grid == b.grid);
    CHECK(rel_l2(a, b) <= 1e-12);
    const cd pa = pair_direct(op, fs, phi, opts), pb = pair_direct(op, big, phi);
    CHECK(std::abs(pa - pb) <= 1e-12 * std::max(1.0, std::abs(pb)));
  }
  DirectOptions bad;
  bad.dilation = 21;
  CHECK_THROWS_AS(apply_direct(op, fs, bad), std::invalid_argument);
}

TEST_CASE("enumeration budget") {
  std::mt19937_64 rng(6);
  const GridSpec g{2, 8};
  const std::vector<Field> fs{full_band(rng, g), full_band(rng, g)};
  CHECK(direct_tuple_count(fs) == 64u * 64u);
  DirectOptions opts;
  opts.budget = 1000;
  CHECK_THROWS_AS(apply_direct(direct_operator(det_symbol(2)), fs, opts), BudgetExceeded);
  ::setenv("MLAB_BUDGET", "100", 1);
  CHECK(enumeration_budget() == 100u);
  CHECK_THROWS_AS(apply_direct(direct_operator(det_symbol(2)), fs), BudgetExceeded);
  ::unsetenv("MLAB_BUDGET");
  CHECK(enumeration_budget() == 200'000'000u);
}

TEST_CASE("input validation") {
  std::mt19937_64 rng(7);
  const std::vector<Field> fs{full_band(rng, {2, 8}), full_band(rng, {2, 16})};
  CHECK_THROWS_AS(apply_direct(direct_operator(det_symbol(2)), fs), std::invalid_argument);
  const std::vector<Field> one{full_band(rng, {2, 8})};
  CHECK_THROWS_AS(apply_direct(direct_operator(det_symbol(2)), one), std::invalid_argument);
  CHECK_THROWS_AS(separable_operator(det_symbol(2), nullptr, build_partition(0, 3)), std::invalid_argument);
}

TEST_CASE("separable path agrees with the direct oracle") {
  std::mt19937_64 rng(8);
  const GridSpec g{2, 16};
  SUBCASE("normalized det, rank 32") {
    const auto sigma = symbol_from_id("det_norm:1", 2);
    auto e = std::make_shared<const SeparableExpansion>(separable_expand(sigma, 64, 32));
    const auto op = separable_operator(sigma, e, covering_partition(g));
    for (int i = 0; i < 3; ++i) {
      const std::vector<Field> fs{trig_field(rng, g, 7), trig_field(rng, g, 7)};
      CHECK(rel_l2(apply_operator(op, fs), apply_direct(op, fs)) <= 1e-5);
    }
  }
  SUBCASE("rank-one product symbol") {
    const auto sigma = symbol_from_id("riesz_product:1,2", 2);
    auto e = std::make_shared<const SeparableExpansion>(separable_expand(sigma, 32, 1));
    const auto op = separable_operator(sigma, e, covering_partition(g));
    const std::vector<Field> fs{trig_field(rng, g, 7), trig_field(rng, g, 7)};
    CHECK(rel_l2(apply_separable(op, fs), apply_direct(op, fs)) <= 1e-8);
  }
  SUBCASE("uncovered modes are reported") {
    const auto sigma = symbol_from_id("det_norm:1", 2);
    auto e = std::make_shared<const SeparableExpansion>(separable_expand(sigma, 16, 4));
    const std::vector<Field> with_mean{trig_field(rng, g, 3, true), trig_field(rng, g, 3)};
    CHECK_THROWS_AS(apply_separable(separable_operator(sigma, e, covering_partition(g)), with_mean), UncoveredSpectrum);
    const std::vector<Field> fs{trig_field(rng, g, 7), trig_field(rng, g, 7)};
    CHECK_THROWS_AS(apply_separable(separable_operator(sigma, e, build_partition(0, 1)), fs), UncoveredSpectrum);
  }
}

TEST_CASE("derivative transfer equals the direct pairing") {
  std::mt19937_64 rng(9);
  SUBCASE("d = m = 2") {
    const GridSpec g{2, 16};
    for (int k : {1, 2}) {
      const auto sigma = det_symbol(2);
      const auto op = direct_operator(power_symbol(sigma, k));
      for (int i = 0; i < 3; ++i) {
        const std::vector<Field> fs{trig_field(rng, g, 7), trig_field(rng, g, 7)};
        const Field phi = trig_field(rng, g, 7, true);
        const cd direct = pair_direct(op, fs, phi);
        CHECK(std::abs(pair_with_transfer(sigma, k, fs, phi) - direct) <= 1e-8 * std::abs(direct));
      }
    }
  }
  SUBCASE("d = m = 3") {
    const GridSpec g{3, 8, 4.0};
    const auto sigma = det_symbol(3);
    const std::vector<Field> fs{trig_field(rng, g, 2), trig_field(rng, g, 2), trig_field(rng, g, 2)};
    const Field phi = trig_field(rng, g, 3);
    const cd direct = pair_direct(direct_operator(sigma), fs, phi);
    CHECK(std::abs(pair_with_transfer(sigma, 1, fs, phi) - direct) <= 1e-8 * std::abs(direct));
  }
  SUBCASE("k = 0 is the plain pairing") {
    const GridSpec g{2, 8};
    const std::vector<Field> fs{trig_field(rng, g, 3), trig_field(rng, g, 3)};
    const Field phi = trig_field(rng, g, 3, true);
    const cd direct = pair_direct(direct_operator(one_symbol(2, 2)), fs, phi);
    CHECK(std::abs(pair_with_transfer(det_symbol(2), 0, fs, phi) - direct) <= 1e-10 * std::abs(direct));
  }
}

TEST_CASE("alternation probe") {
  CHECK_NOTHROW(require_alternating(det_symbol(3)));
  CHECK_NOTHROW(require_alternating(minor_symbol(3, {0, 2})));
  CHECK_THROWS_AS(require_alternating(dot_symbol(2)), std::invalid_argument);
  CHECK_THROWS_AS(require_alternating(power_symbol(det_symbol(2), 2)), std::invalid_argument);
}
