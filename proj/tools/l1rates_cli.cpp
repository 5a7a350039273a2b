// Command line front end: certify, phi, check-vi, solve, rates, nazarov, example.
//
// Exit codes: 0 success, 1 an asserted invariant failed, 2 usage or configuration error.

#include "l1rates/l1rates.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace l1rates;
using config::json;

namespace {

constexpr int kInvariantFailed = 1;
constexpr int kUsageError = 2;

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

void write_file(const Globals& g, const std::string& name, const std::string& content) {
  fs::create_directories(g.out_dir);
  const fs::path path = fs::path(g.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const Globals& g, const std::string& name, const json& j) { write_file(g, name, j.dump(2) + "\n"); }

json load_config(const Globals& g) {
  if (g.config_path.empty()) throw config::ConfigError("this subcommand needs --config <path>");
  return config::load(g.config_path);
}

std::uint64_t seed_of(const Globals& g, const json& cfg) {
  return g.seed ? *g.seed : cfg.value("seed", std::uint64_t{0});
}

Index n_max_of(const json& cfg, const ForwardOperator& op) {
  return cfg.value("n_max", op.domain_dim());
}

GammaTable certify_table(const json& cfg, const ForwardOperator& op) {
  return assemble_assumption(op, parse_family(cfg.value("family", std::string("all-subsets"))), n_max_of(cfg, op),
                             cfg.value("c_target", 0.5), config::parse_assemble(cfg));
}

void emit_gammas(const Globals& g, const GammaTable& t) {
  if (g.format == "json")
    write_json(g, "gammas.json", io::to_json(t));
  else
    write_file(g, "gammas.csv", io::gamma_table_csv(t));
}

void emit_phi(const Globals& g, const RateFunction& phi) {
  if (g.format == "json")
    write_json(g, "phi.json", io::to_json(phi));
  else
    write_file(g, "phi.csv", io::phi_csv(phi));
}

int run_certify(const Globals& g) {
  const json cfg = load_config(g);
  const ForwardOperator op = config::parse_operator(config::require(cfg, "operator", "config"));
  const Index n_max = n_max_of(cfg, op);
  try {
    const GammaTable t = certify_table(cfg, op);
    emit_gammas(g, t);
    write_json(g, "summary.json", {{"certified", true}, {"n_max", n_max}, {"table", io::to_json(t)}});
    std::cout << "certified: n_max=" << n_max << " c=" << io::fmt(t.c_used) << " method=" << to_string(t.method)
              << " beta=" << io::fmt(compute_beta(t.c_used)) << "\n";
    for (const auto& e : t.entries) std::cout << "  gamma_" << e.n << " = " << io::fmt(e.gamma) << "\n";
    return 0;
  } catch (const CertificationError& e) {
    write_json(g, "summary.json", {{"certified", false}, {"n_max", n_max}, {"reason", e.what()}});
    std::cout << "NOT certified: " << e.what() << "\n";
    return kInvariantFailed;
  }
}

struct PhiSetup {
  ForwardOperator op;
  TruncatedSequence xdag;
  GammaTable table;
  RateFunction phi;
};

PhiSetup phi_setup(const json& cfg) {
  ForwardOperator op = config::parse_operator(config::require(cfg, "operator", "config"));
  TruncatedSequence xdag = config::parse_xdag(config::require(cfg, "xdag", "config"), op.domain_dim(), op.index_origin());
  GammaTable t = certify_table(cfg, op);
  RateFunction phi = build_phi(xdag, t);
  return {std::move(op), std::move(xdag), std::move(t), std::move(phi)};
}

int run_phi(const Globals& g) {
  const json cfg = load_config(g);
  const PhiSetup s = phi_setup(cfg);
  emit_gammas(g, s.table);
  emit_phi(g, s.phi);
  write_json(g, "summary.json", {{"phi", io::to_json(s.phi)}, {"beta", compute_beta(s.table.c_used)}});
  std::cout << "phi: " << s.phi.envelope().size() << " pieces, c=" << io::fmt(s.table.c_used) << "\n";
  return 0;
}

int run_check_vi(const Globals& g) {
  const json cfg = load_config(g);
  const PhiSetup s = phi_setup(cfg);
  const ViSamplerConfig vc = config::parse_vi(cfg.value("vi", json::object()), seed_of(g, cfg));
  const ViReport rep = check_vi(s.op, s.xdag, compute_beta(s.table.c_used), s.phi, vc);
  const json j = io::to_json(rep);
  write_json(g, "summary.json", j);
  std::cout << j.dump(2) << "\n";
  return rep.holds() ? 0 : kInvariantFailed;
}

int run_solve(const Globals& g) {
  const json cfg = load_config(g);
  const ForwardOperator op = config::parse_operator(config::require(cfg, "operator", "config"));
  const int p = cfg.value("p", 2);
  const SolverOptions opt = cfg.contains("solver") ? config::parse_solver(cfg.at("solver")) : SolverOptions{};
  DataVector yd;
  double delta = cfg.value("delta", 0.0);
  if (cfg.contains("y_delta")) {
    yd = config::parse_vector(cfg.at("y_delta"), "y_delta");
  } else if (cfg.contains("noise")) {
    const TruncatedSequence xdag =
        config::parse_xdag(config::require(cfg, "xdag", "config"), op.domain_dim(), op.index_origin());
    delta = config::require(cfg.at("noise"), "delta", "noise").get<double>();
    yd = synthesize_noise(op, op.apply(xdag), delta, seed_of(g, cfg));
  } else {
    throw config::ConfigError("solve: give either y_delta or noise{delta} with xdag");
  }
  double alpha = 0.0;
  if (cfg.contains("alpha")) {
    alpha = cfg.at("alpha").get<double>();
  } else if (cfg.contains("alpha_rule")) {
    alpha = choose_alpha(config::parse_alpha_rule(cfg.at("alpha_rule")), delta, op, yd, p, opt);
  } else {
    throw config::ConfigError("solve: give alpha or alpha_rule");
  }
  int code = 0;
  json out;
  try {
    const SolveResult r = solve_tikhonov(TikhonovProblem{op, yd, alpha, p}, opt);
    out = io::to_json(r);
    out["converged"] = true;
  } catch (const SolverError& e) {
    out = io::to_json(e.best());
    out["converged"] = false;
    out["error"] = e.what();
    code = kInvariantFailed;
  }
  out["alpha"] = io::num(alpha);
  out["p"] = p;
  write_json(g, "solution.json", out);
  write_json(g, "summary.json", {{"alpha", io::num(alpha)}, {"converged", code == 0}, {"diagnostics", out["diagnostics"]}});
  std::cout << out["diagnostics"].dump(2) << "\n";
  return code;
}

int run_rates(const Globals& g) {
  const json cfg = load_config(g);
  const ExperimentConfig ec = config::parse_experiment(cfg, g.seed);
  const ExperimentResult res = run_rate_experiment(ec);
  emit_gammas(g, res.gammas);
  emit_phi(g, *res.phi);
  if (g.format == "json")
    write_json(g, "records.json", io::records_json(res.records));
  else
    write_file(g, "records.csv", io::records_csv(res.records));
  const json summary = io::summary_json(res);
  write_json(g, "summary.json", summary);
  std::cout << "slope=" << io::fmt(res.slope) << " max_ratio=" << io::fmt(res.max_ratio)
            << " failed_cells=" << res.failed_cells << "\n";
  return res.failed_cells == 0 ? 0 : kInvariantFailed;
}

int run_nazarov(const Globals& g) {
  const json cfg = load_config(g);
  const std::uint64_t seed = seed_of(g, cfg);
  const json& block = config::require(cfg, "nazarov", "config");
  std::vector<json> runs;
  if (block.is_array())
    runs.assign(block.begin(), block.end());
  else
    runs.push_back(block);
  std::string csv = io::nazarov_csv_header();
  json reports = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const NazarovReport r = nazarov_check(config::parse_nazarov(runs[i], seed ^ mix64(i)));
    csv += io::nazarov_csv_row(r);
    reports.push_back(io::to_json(r));
    ok = ok && r.violations == 0 && r.upper_violations == 0;
  }
  if (g.format == "json")
    write_json(g, "nazarov.json", reports);
  else
    write_file(g, "nazarov.csv", csv);
  write_json(g, "summary.json", {{"runs", reports}, {"passed", ok}});
  std::cout << (ok ? "no violations" : "VIOLATIONS FOUND") << " in " << runs.size() << " run(s)\n";
  return ok ? 0 : kInvariantFailed;
}

int run_example(const Globals& g, const std::string& name) {
  const ExampleBundle b = reproduce_example(name, g.seed.value_or(0));
  for (const auto& [file, content] : b.files) write_file(g, file, content);
  write_json(g, "summary.json", b.summary);
  std::cout << "example " << b.name << ": " << (b.passed ? "passed" : "FAILED") << "\n";
  return b.passed ? 0 : kInvariantFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l1-Tikhonov convergence-rate toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "64-bit seed (overrides the config)");
  app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* certify = app.add_subcommand("certify", "certify the source condition and print the gamma table");
  auto* phi = app.add_subcommand("phi", "build the rate function phi");
  auto* vi = app.add_subcommand("check-vi", "sample the variational inequality");
  auto* solve = app.add_subcommand("solve", "minimize the Tikhonov functional");
  auto* rates = app.add_subcommand("rates", "run a convergence-rate experiment");
  auto* naz = app.add_subcommand("nazarov", "check the Turan-Nazarov bound on random polynomials");
  auto* example = app.add_subcommand("example", "reproduce a worked example");
  std::string example_name;
  example->add_option("name", example_name, "denoising or wiener")
      ->required()
      ->check(CLI::IsMember({"denoising", "wiener"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*certify) return run_certify(g);
    if (*phi) return run_phi(g);
    if (*vi) return run_check_vi(g);
    if (*solve) return run_solve(g);
    if (*rates) return run_rates(g);
    if (*naz) return run_nazarov(g);
    if (*example) return run_example(g, example_name);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CertificationError& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    return kInvariantFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariantFailed;
  }
  return kUsageError;
}
