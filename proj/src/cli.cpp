#include "mlab/cli.hpp"

#include "mlab/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace mlab {

namespace {

GridSpec parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("--grid expects DxN, e.g. 2x16");
  GridSpec g;
  try {
    g.d = std::stoi(s.substr(0, x));
    g.n = std::stoi(s.substr(x + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("--grid expects DxN, e.g. 2x16");
  }
  g.validate();
  return g;
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> dims;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      dims.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("--dims expects a comma-separated list such as 2,3");
    }
  }
  if (dims.empty()) throw std::invalid_argument("--dims is empty");
  return dims;
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string grid;
  std::string symbol;
  std::string out;
  std::optional<int> t_max;
  std::optional<int> family;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "experiment config (JSON)");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--grid", f.grid, "grid as DxN, e.g. 2x16");
  app->add_option("--symbol", f.symbol, "symbol id");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--t-max", f.t_max, "largest dilation exponent");
  app->add_option("--family", f.family, "family size");
}

/// Defaults per experiment, used when no config file is given.
ExperimentConfig defaults_for(const std::string& kind, const std::optional<GridSpec>& grid) {
  ExperimentConfig c;
  c.id = kind;
  if (kind == "hessian-estimate") c.grid = GridSpec{3, 8};
  if (grid) c.grid = *grid;
  const int d = c.grid.d;
  if (kind == "jacobian-estimate" || kind == "hessian-estimate") {
    c.symbol = "det";
    c.m = d;
    c.p.assign(static_cast<std::size_t>(d), static_cast<double>(d));
    c.r = 1.0;
    c.t_max = 5;
    c.field.max_radius = 3.0;
  } else if (kind == "thm3-scan") {
    c.symbol = "det";
    c.m = d;
    c.p.assign(static_cast<std::size_t>(d), 2.0 * d);
    c.r = 2.0;
    c.k = 1;
    c.field.max_radius = 4.0;
  }
  return c;
}

ExperimentConfig resolve_config(const std::string& kind, const CommonFlags& f) {
  std::optional<GridSpec> grid;
  if (!f.grid.empty()) grid = parse_grid(f.grid);
  ExperimentConfig c = f.config.empty() ? defaults_for(kind, grid) : load_config(f.config);
  if (!f.config.empty() && grid) c.grid = *grid;
  if (f.seed) c.seed = *f.seed;
  if (!f.symbol.empty()) c.symbol = f.symbol;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.t_max) c.t_max = *f.t_max;
  if (f.family) c.family_size = *f.family;
  return c;
}

int finish_record(const ReportRecord& rec, const ExperimentConfig& cfg, std::ostream& out) {
  const auto dir = write_record(cfg.output_dir, rec);
  out << to_json(rec).dump() << '\n';
  out << "wrote " << (dir / "records.jsonl").string() << " and " << (dir / "summary.csv").string() << '\n';
  return rec.pass ? 0 : 2;
}

int report(const std::string& out_dir, const std::string& id, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<fs::path> dirs;
  if (!id.empty()) {
    dirs.push_back(fs::path(out_dir) / id);
  } else if (fs::is_directory(out_dir)) {
    for (const auto& e : fs::directory_iterator(out_dir))
      if (e.is_directory() && fs::exists(e.path() / "records.jsonl")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
  }
  bool all_pass = true;
  std::size_t seen = 0;
  for (const auto& d : dirs) {
    std::ifstream in(d / "records.jsonl");
    if (!in) {
      err << "no records in " << d.string() << '\n';
      return 1;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      ++seen;
      const bool pass = j.at("pass").get<bool>();
      all_pass = all_pass && pass;
      out << (pass ? "PASS " : "FAIL ") << j.at("experiment").get<std::string>() << ' '
          << j.at("kind").get<std::string>() << " max_ratio=" << j.at("max_ratio").get<double>()
          << " sweep_spread=" << j.at("sweep_spread").get<double>() << " policy="
          << j.at("threshold_policy").get<std::string>() << '\n';
    }
  }
  if (seen == 0) {
    err << "no records found under " << out_dir << '\n';
    return 1;
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilinear Fourier multiplier laboratory"};
  app.require_subcommand(1);

  std::string dims = "2,3,4";
  int instances = 20;
  std::uint64_t identity_seed = 1;
  auto* verify = app.add_subcommand("verify-identities", "exact polynomial identity suite");
  verify->add_option("--dims", dims, "dimensions, e.g. 2,3");
  verify->add_option("--instances", instances, "random instances per identity");
  verify->add_option("--seed", identity_seed, "random seed");

  CommonFlags bf, tf, jf, hf, df;
  auto* bounded = app.add_subcommand("boundedness-scan", "ratio ||T(f)||_r / prod ||f_j||_{p_j} with a dilation sweep");
  add_common(bounded, bf);
  std::optional<int> tk;
  auto* thm3 = app.add_subcommand("thm3-scan", "derivative-transfer pairing ratio");
  add_common(thm3, tf);
  thm3->add_option("--k", tk, "power of the alternating symbol");
  auto* jac = app.add_subcommand("jacobian-estimate", "Jacobian pairing estimate and oscillation sweep");
  add_common(jac, jf);
  auto* hes = app.add_subcommand("hessian-estimate", "Hessian pairing estimate and oscillation sweep");
  add_common(hes, hf);

  int m = 2, rank = 32, points = 64;
  std::optional<double> max_decay;
  auto* decomp = app.add_subcommand("decompose-symbol", "separable expansion of a symbol on the annulus");
  add_common(decomp, df);
  decomp->add_option("--m", m, "arity");
  decomp->add_option("--rank", rank, "number of terms");
  decomp->add_option("--annulus-points", points, "angular nodes (radial = half)");
  decomp->add_option("--max-decay", max_decay, "fail unless s_rank / s_1 <= this");

  std::string report_out = "out", report_id;
  auto* rep = app.add_subcommand("report", "summarize stored records");
  rep->add_option("--out", report_out, "output directory");
  rep->add_option("--id", report_id, "experiment id (default: all)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 1;
  }

  try {
    if (*verify) {
      const auto reports = verify_identities(parse_dims(dims), instances, identity_seed);
      nlohmann::json arr = nlohmann::json::array();
      bool pass = true;
      for (const auto& r : reports) {
        arr.push_back(to_json(r));
        pass = pass && r.pass;
      }
      out << arr.dump(2) << '\n';
      return pass ? 0 : 2;
    }
    if (*bounded) {
      const auto cfg = resolve_config("boundedness-scan", bf);
      return finish_record(boundedness_scan(cfg), cfg, out);
    }
    if (*thm3) {
      auto cfg = resolve_config("thm3-scan", tf);
      if (tk) cfg.k = *tk;
      const auto sigma = symbol_from_id(cfg.symbol, cfg.grid.d, cfg.m);
      return finish_record(thm3_estimate_ratio(cfg, sigma, cfg.k), cfg, out);
    }
    if (*jac) {
      const auto cfg = resolve_config("jacobian-estimate", jf);
      return finish_record(jacobian_estimate(cfg), cfg, out);
    }
    if (*hes) {
      const auto cfg = resolve_config("hessian-estimate", hf);
      return finish_record(hessian_estimate(cfg), cfg, out);
    }
    if (*decomp) {
      auto cfg = resolve_config("decompose-symbol", df);
      const auto sigma = symbol_from_id(cfg.symbol, cfg.grid.d, m);
      const auto e = separable_expand(sigma, points, rank);
      const auto dir = std::filesystem::path(cfg.output_dir) / cfg.id;
      std::filesystem::create_directories(dir);
      save_expansion(dir / "expansion", e);
      const double decay = e.spectrum.empty() || e.spectrum[0] == 0.0
                               ? 0.0
                               : e.spectrum[std::min<std::size_t>(static_cast<std::size_t>(rank), e.spectrum.size()) - 1] /
                                     e.spectrum[0];
      nlohmann::json j = {{"symbol", cfg.symbol}, {"m", e.m},           {"d", e.d},
                          {"rank", e.rank()},     {"residual", e.residual}, {"decay_at_rank", decay},
                          {"spectrum", e.spectrum}, {"files", (dir / "expansion").string() + ".{json,fld}"}};
      out << j.dump() << '\n';
      return max_decay && decay > *max_decay ? 2 : 0;
    }
    if (*rep) return report(report_out, report_id, out, err);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << " (raise MLAB_BUDGET)\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mlab
