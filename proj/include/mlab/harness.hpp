#pragma once

// Experiment driver: seeded random field families, boundedness-ratio scans
// with dyadic dilation sweeps, and the Jacobian/Hessian estimate experiments.
// Thresholds here are experiment policy, not constants derived from proofs.

#include "mlab/determinants.hpp"
#include "mlab/function_spaces.hpp"
#include "mlab/multilinear_op.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlab {

struct FieldShape {
  double max_radius = 0.0;  ///< keep |xi| <= max_radius (lattice units); 0 keeps all
  int max_degree = -1;      ///< keep max_a |xi_a| <= max_degree; -1 keeps all
};

/// Real field with |coeff(xi)| = (1 + |xi|)^-gamma and independent uniform
/// phases, Hermitian symmetric. Modes with a Nyquist component are zero.
Field random_field(std::uint64_t seed, const GridSpec& grid, double gamma, bool mean_zero = true,
                   const FieldShape& shape = {});

/// Mixes (seed, a, b) into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct ExperimentConfig {
  std::string id = "experiment";
  GridSpec grid{2, 16};
  std::string symbol = "det_norm:1";
  int m = 2;
  std::vector<double> p{2.0, 2.0};
  double r = 1.0;
  double s = -1.0;  ///< < 0: derived from the experiment
  int k = 1;
  /// Exponent w of (1 + |xi|^2)^w in the transfer-pairing weights; < 0 means s / 2.
  double weight_exponent = -1.0;
  std::uint64_t seed = 1;
  int family_size = 4;
  int t_min = 0;
  int t_max = 3;
  Strategy strategy = Strategy::Direct;
  int rank = 32;
  int annulus_points = 64;
  double gamma = 1.0;
  FieldShape field;
  double test_gamma = 2.0;
  double test_radius = 2.0;
  double perturbation = 0.1;          ///< v = u + perturbation * w
  double invariance_threshold = 1.01;  ///< max/min sweep ratio for exact invariances
  double growth_threshold = 4.0;       ///< max sweep ratio / ratio at t_min
  std::string output_dir = "out";

  /// Hölder relation, ranges, grid.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);
/// FNV-1a 64 of the canonical JSON, hex.
std::string config_hash(const ExperimentConfig& c);

struct SweepRow {
  int t = 0;
  std::vector<double> ratios;
  double max = 0.0;
  double median = 0.0;
  double min = 0.0;
  std::optional<double> difference_max;  ///< Jacobian/Hessian difference form
};

struct ReportRecord {
  std::string experiment;
  std::string kind;
  std::string config_hash;
  std::string symbol;
  std::vector<double> ratios;  ///< per instance at t_min
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  double min_ratio = 0.0;
  std::vector<SweepRow> sweep;
  /// boundedness: max over instances of max_t R / min_t R;
  /// oscillation: max over t of the family maximum / family maximum at t_min.
  double sweep_spread = 0.0;
  std::map<std::string, double> metrics;
  std::string threshold_policy;
  double threshold = 0.0;
  bool pass = false;
  double runtime_seconds = 0.0;
};

nlohmann::json to_json(const ReportRecord& r);
/// Everything except runtime, for determinism checks.
nlohmann::json payload(const ReportRecord& r);

ReportRecord boundedness_scan(const ExperimentConfig& cfg);
ReportRecord thm3_estimate_ratio(const ExperimentConfig& cfg, const SymbolSpec& sigma, int k);
ReportRecord jacobian_estimate(const ExperimentConfig& cfg);
ReportRecord hessian_estimate(const ExperimentConfig& cfg);

/// Appends to <dir>/<id>/records.jsonl and rewrites <dir>/<id>/summary.csv
/// with one row per family member.
std::filesystem::path write_record(const std::filesystem::path& dir, const ReportRecord& r);

nlohmann::json to_json(const DetReport& r);

}  // namespace mlab
