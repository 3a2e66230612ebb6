#include "mlab/harness.hpp"

#include <doctest.h>

#include <fstream>
#include <set>

using namespace mlab;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("random fields: real, Hermitian, prescribed modulus") {
  const GridSpec g{2, 16};
  const Field f = random_field(42, g, 1.5);
  CHECK(f.real);
  CHECK(f.imag_ratio() == 0.0);
  const auto s = dft_forward(f);
  std::vector<int> xi(2), neg(2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    frequency_at(i, g, xi);
    const cd c = s.coeffs[static_cast<Eigen::Index>(i)];
    if (xi[0] == -8 || xi[1] == -8 || (xi[0] == 0 && xi[1] == 0)) {
      CHECK(std::abs(c) < 1e-15);
      continue;
    }
    CHECK(std::abs(std::abs(c) - std::pow(1.0 + std::hypot(xi[0], xi[1]), -1.5)) < 1e-14);
    neg = {-xi[0], -xi[1]};
    CHECK(std::abs(s.at(neg) - std::conj(c)) < 1e-14);
  }
}

TEST_CASE("random fields: determinism and shape limits") {
  const GridSpec g{2, 16};
  CHECK(random_field(1, g, 1.0).samples == random_field(1, g, 1.0).samples);
  CHECK(random_field(1, g, 1.0).samples != random_field(2, g, 1.0).samples);
  CHECK(max_active_frequency(dft_forward(random_field(3, g, 1.0, true, {0.0, 2}))) == 2);
  CHECK(max_active_frequency(dft_forward(random_field(3, g, 1.0, true, {3.0, -1}))) == 3);
  const auto with_mean = dft_forward(random_field(3, g, 1.0, false));
  CHECK(std::abs(std::abs(with_mean.coeffs[0]) - 1.0) < 1e-14);
  CHECK_THROWS_AS(random_field(1, g, -1.0), std::invalid_argument);
}

TEST_CASE("derived seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, a, b));
  CHECK(seen.size() == 400u);
}

TEST_CASE("config round trip, hash and validation") {
  ExperimentConfig c;
  c.id = "round";
  c.grid = {3, 8, 1.0};
  c.m = 3;
  c.p = {3.0, 3.0, 3.0};
  c.r = 1.0;
  c.field.max_radius = 2.5;
  c.strategy = Strategy::Separable;
  const auto j = to_json(c);
  const auto back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16u);
  c.seed = 2;
  CHECK(config_hash(back) != config_hash(c));

  CHECK_THROWS_AS(config_from_json({{"unknown", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"grid", {{"d", 2}, {"size", 8}}}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"p", {2.0, 3.0}}, {"r", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"t_max", 13}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"strategy", "fast"}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"grid", {{"d", 2}, {"n", 12}}}}), std::invalid_argument);

  const auto dir = scratch("config");
  std::ofstream(dir / "bad.json") << "{ \"id\": ";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), std::invalid_argument);
  std::ofstream(dir / "good.json") << j.dump();
  CHECK(config_hash(load_config(dir / "good.json")) == config_hash(back));
  CHECK_THROWS_AS(load_config(dir / "missing.json"), std::invalid_argument);
}

TEST_CASE("boundedness scan of a degree-0 symbol is dilation invariant") {
  ExperimentConfig c;
  c.grid = {2, 8};
  c.symbol = "det_norm:1";
  c.p = {4.0, 4.0};
  c.r = 2.0;
  c.family_size = 3;
  c.t_max = 2;
  const auto rec = boundedness_scan(c);
  CHECK(rec.threshold_policy == "dilation-invariance");
  CHECK(rec.pass);
  CHECK(rec.sweep.size() == 3u);
  CHECK(rec.sweep_spread <= 1.0 + 1e-10);
  CHECK(rec.ratios.size() == 3u);
  CHECK(payload(rec) == payload(boundedness_scan(c)));

  c.strategy = Strategy::Separable;
  c.annulus_points = 32;
  c.rank = 4;
  const auto sep = boundedness_scan(c);
  for (std::size_t i = 0; i < rec.ratios.size(); ++i) CHECK(sep.ratios[i] == doctest::Approx(rec.ratios[i]).epsilon(1e-6));
}

TEST_CASE("non-homogeneous symbols are reported without a threshold") {
  ExperimentConfig c;
  c.grid = {2, 8};
  c.symbol = "det";
  c.family_size = 2;
  c.t_max = 1;
  const auto rec = boundedness_scan(c);
  CHECK(rec.threshold_policy == "report-only");
  // |T(f(2^t .))| scales with 4^t for the bilinear det symbol.
  CHECK(rec.sweep[1].max / rec.sweep[0].max > 3.0);
}

TEST_CASE("transfer pairing scan") {
  ExperimentConfig c;
  c.grid = {2, 16};
  c.symbol = "det";
  c.p = {4.0, 4.0};
  c.r = 2.0;
  c.family_size = 2;
  c.t_max = 2;
  c.field.max_radius = 4.0;
  const auto rec = thm3_estimate_ratio(c, symbol_from_id("det", 2), 1);
  CHECK(rec.metrics.at("s") == doctest::Approx(0.5));
  CHECK(rec.metrics.at("weight_exponent") == doctest::Approx(0.25));
  CHECK(rec.threshold_policy == "oscillation-growth");
  CHECK(std::isfinite(rec.max_ratio));
  c.s = 0.7;
  CHECK_THROWS_AS(thm3_estimate_ratio(c, symbol_from_id("det", 2), 1), std::invalid_argument);
  c.s = -1.0;
  CHECK_THROWS_AS(thm3_estimate_ratio(c, symbol_from_id("dot_norm:1", 2), 1), std::invalid_argument);
}

TEST_CASE("Jacobian estimate experiment") {
  ExperimentConfig c;
  c.grid = {2, 16};
  c.symbol = "det";
  c.p = {2.0, 2.0};
  c.r = 1.0;
  c.family_size = 2;
  c.t_max = 3;
  c.field.max_radius = 3.0;
  const auto rec = jacobian_estimate(c);
  CHECK(rec.metrics.at("s") == doctest::Approx(0.5));
  CHECK(rec.metrics.at("equal_inputs_numerator") == 0.0);
  CHECK(rec.sweep.front().difference_max.has_value());
  CHECK(rec.pass);
  c.p = {4.0, 4.0};
  c.r = 2.0;
  CHECK_THROWS_AS(jacobian_estimate(c), std::invalid_argument);
}

TEST_CASE("records are written as JSON lines and CSV") {
  ExperimentConfig c;
  c.id = "io";
  c.grid = {2, 8};
  c.family_size = 2;
  c.t_max = 1;
  const auto dir = scratch("records");
  const auto rec = boundedness_scan(c);
  write_record(dir, rec);
  const auto out = write_record(dir, rec);
  std::ifstream jl(out / "records.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(jl, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("config_hash") == rec.config_hash);
    ++lines;
  }
  CHECK(lines == 2);
  std::ifstream csv(out / "summary.csv");
  std::getline(csv, line);
  CHECK(line == "experiment,kind,instance,ratio,sweep_min,sweep_max");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("Hessian estimate in two dimensions gives finite ratios") {
  ExperimentConfig c;
  c.grid = {2, 16};
  c.symbol = "det";
  c.p = {2.0, 2.0};
  c.r = 1.0;
  c.family_size = 2;
  c.t_max = 2;
  c.field.max_radius = 3.0;
  const auto rec = hessian_estimate(c);
  CHECK(rec.metrics.at("s") == doctest::Approx(1.0));
  CHECK(rec.metrics.at("equal_inputs_numerator") == 0.0);
  for (const auto& row : rec.sweep) CHECK(std::isfinite(row.max));
  CHECK(rec.max_ratio > 0.0);
}

TEST_CASE("estimate payloads are reproducible") {
  ExperimentConfig c;
  c.grid = {2, 16};
  c.symbol = "det";
  c.p = {2.0, 2.0};
  c.r = 1.0;
  c.family_size = 3;
  c.t_max = 2;
  c.field.max_radius = 3.0;
  CHECK(payload(jacobian_estimate(c)) == payload(jacobian_estimate(c)));
}
