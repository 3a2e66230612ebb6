#include "mlab/field_io.hpp"
#include "mlab/grid_spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace mlab;
using mlab::testing::naive_dft;
using mlab::testing::trig_field;

TEST_CASE("dft_forward matches the direct sum") {
  std::mt19937_64 rng(11);
  for (GridSpec g : {GridSpec{1, 16}, GridSpec{2, 8}, GridSpec{3, 4}}) {
    std::normal_distribution<double> N;
    ComplexVector<double> s(static_cast<Eigen::Index>(g.size()));
    for (auto& v : s) v = cd(N(rng), N(rng));
    const Field f(g, s);
    const auto oracle = naive_dft(f);
    const auto fast = dft_forward(f);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(fast.coeffs[static_cast<Eigen::Index>(i)] - oracle[i]));
    CHECK(err < 1e-13);
  }
}

TEST_CASE("single mode lands in its FFT slot") {
  const GridSpec g{2, 8, 3.0};
  const int e0 = -3, e1 = 2;
  const Field f = Field::sample(g, [&](const Eigen::VectorXd& x) {
    return std::exp(cd(0.0, g.wavenumber() * (e0 * x[0] + e1 * x[1])));
  });
  const auto s = dft_forward(f);
  const std::vector<int> xi{e0, e1};
  CHECK(std::abs(s.at(xi) - 1.0) < 1e-14);
  CHECK(std::abs(s.coeffs.norm() - 1.0) < 1e-14);
}

TEST_CASE("round trip and Parseval") {
  std::mt19937_64 rng(3);
  const GridSpec g{2, 16};
  const Field f = trig_field(rng, g, 7, true);
  const auto s = dft_forward(f);
  CHECK((dft_inverse(s).samples - f.samples).norm() < 1e-12 * f.samples.norm());
  const double lhs = f.samples.squaredNorm() / static_cast<double>(g.size());
  CHECK(std::abs(lhs - s.coeffs.squaredNorm()) < 1e-12 * lhs);
}

TEST_CASE("spectral derivative of a trigonometric polynomial") {
  const GridSpec g{2, 16, 5.0};
  const double k = g.wavenumber();
  const Field f = Field::sample(g, [&](const Eigen::VectorXd& x) { return std::sin(2 * k * x[0]) * std::cos(3 * k * x[1]); });
  const Field expect = Field::sample(g, [&](const Eigen::VectorXd& x) { return -3 * k * std::sin(2 * k * x[0]) * std::sin(3 * k * x[1]); });
  CHECK((spectral_derivative(f, 1).samples - expect.samples).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(spectral_derivative(f, 2), std::invalid_argument);
}

TEST_CASE("resample is exact interpolation for band-limited fields") {
  std::mt19937_64 rng(5);
  const GridSpec g{2, 8};
  const Field f = trig_field(rng, g, 3);
  const Field up = resample(f, 32);
  // Up then down is the identity.
  CHECK((resample(up, 8).samples - f.samples).norm() < 1e-12 * f.samples.norm());
  // Every fourth fine sample is a coarse sample.
  double err = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      err = std::max(err, std::abs(up.samples[(4 * i) * 32 + 4 * j] - f.samples[i * 8 + j]));
  CHECK(err < 1e-12);
}

TEST_CASE("dealiased product equals the truncated exact product") {
  std::mt19937_64 rng(9);
  const GridSpec g{1, 16};
  const std::vector<Field> fs{trig_field(rng, g, 7), trig_field(rng, g, 7)};
  const Field d = dealiased_product(std::span<const Field>(fs), 2);
  // Exact product spectrum is the convolution of the coefficient sequences.
  const auto a = naive_dft(fs[0]), b = naive_dft(fs[1]);
  std::vector<cd> conv(16, 0.0);
  for (int p = -8; p < 8; ++p)
    for (int q = -8; q < 8; ++q)
      if (frequency_fits(p + q, 16))
        conv[static_cast<std::size_t>(slot_of_frequency(p + q, 16))] +=
            a[static_cast<std::size_t>(slot_of_frequency(p, 16))] * b[static_cast<std::size_t>(slot_of_frequency(q, 16))];
  const auto got = dft_forward(d);
  double err = 0.0;
  for (int i = 0; i < 16; ++i) err = std::max(err, std::abs(got.coeffs[i] - conv[static_cast<std::size_t>(i)]));
  CHECK(err < 1e-12);
  CHECK_THROWS_AS(dealiased_product(std::span<const Field>(fs), 1), std::invalid_argument);
}

TEST_CASE("dyadic dilation samples f(2^t x)") {
  const GridSpec g{2, 8};
  const double k = g.wavenumber();
  auto f = [&](const Eigen::VectorXd& x) { return std::cos(k * x[0] - 2 * k * x[1]) + 0.5 * std::sin(3 * k * x[0]); };
  const Field base = Field::sample(g, f);
  for (int t = 1; t <= 2; ++t) {
    const Field dil = dilate_dyadic(base, t, DilationGrid::Fit);
    const Field expect = Field::sample(dil.grid, [&](const Eigen::VectorXd& x) { return f(std::ldexp(1.0, t) * x); });
    CHECK((dil.samples - expect.samples).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(dilate_dyadic(base, t, DilationGrid::Scale).grid.n == (8 << t));
  }
  CHECK_THROWS_AS(dilate_dyadic(base, 1, DilationGrid::Fixed), std::range_error);
  CHECK(max_active_frequency(dft_forward(base)) == 3);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec({2, 6}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({0, 8}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Field(GridSpec{1, 8}, ComplexVector<double>::Zero(7)), std::invalid_argument);
  CHECK(padded_size(12, 2) == 32);
}

TEST_CASE("frequency and slot helpers are inverse") {
  for (int n : {4, 8, 16})
    for (int q = 0; q < n; ++q) CHECK(slot_of_frequency(frequency_of_slot(q, n), n) == q);
}

TEST_CASE("field snapshots round trip") {
  std::mt19937_64 rng(1);
  const GridSpec g{2, 8, 1.5};
  const Field a = trig_field(rng, g, 3), b = trig_field(rng, g.with_n(4), 1);
  std::stringstream ss;
  write_field(ss, a);
  write_field(ss, b);
  const auto back = read_fields(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].grid == a.grid);
  CHECK(back[0].samples == a.samples);
  CHECK(back[1].samples == b.samples);
  std::stringstream bad("NOTAFIELD.......");
  CHECK_THROWS(read_field(bad));
}
