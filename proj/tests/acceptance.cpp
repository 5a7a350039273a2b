// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include "l1rates/l1rates.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <unistd.h>

#ifndef L1RATES_CLI_PATH
#error "L1RATES_CLI_PATH must name the CLI binary"
#endif

using namespace l1rates;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

template <class F>
void run(int id, const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string str(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

TruncatedSequence power_decay(Index n, double mu) {
  Vector v(n);
  for (Index k = 0; k < n; ++k) v[k] = std::pow(static_cast<double>(k + 1), -mu);
  return TruncatedSequence(v);
}

Vector gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index k = 0; k < n; ++k) v[k] = normal(rng);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void embedding_gammas() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double q : {1.5, 2.0, 4.0, kInfinity}) {
    const auto op = ForwardOperator::lq_embedding(12, q);
    for (Index n = 1; n <= 5; ++n) {
      const double bf = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      const double want = std::isinf(q) ? static_cast<double>(n) : std::pow(static_cast<double>(n), 1.0 - 1.0 / q);
      worst = std::max(worst, std::abs(bf - want) / want);
    }
  }
  const double secs = seconds_since(t0);
  report(1, "embedding gamma_n = n^(1-1/q)", worst <= 1e-9 && secs < 30.0,
         "max rel error " + str(worst) + ", " + str(secs) + " s");
}

void two_routes_agree() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> rows(6, 12), cols(4, 8);
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n_cols = cols(rng);
    const Index n_rows = std::max<Index>(rows(rng), n_cols);
    const Matrix a = oracle::random_matrix(n_rows, n_cols, rng());
    const auto op = ForwardOperator::dense(a);
    for (Index n = 1; n <= 3; ++n) {
      const double g1 = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      const double g2 = injectivity_gamma_exhaustive(op, n, IndexSetFamily::all_subsets).value();
      worst = std::max(worst, std::abs(g1 - g2) / g2);
      ++cases;
    }
  }
  report(2, "certificate gamma equals injectivity gamma", worst <= 1e-6,
         std::to_string(cases) + " cases, max rel diff " + str(worst));
}

void gamma_monotone() {
  bool mono = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto op = ForwardOperator::dense(oracle::random_matrix(10, 6, 300 + seed));
    double prev = 0.0;
    for (Index n = 1; n <= 6; ++n) {
      const double g = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      if (g < prev * (1.0 - 1e-12)) mono = false;
      prev = g;
    }
  }
  constexpr Index kN = 8;
  Matrix d = Matrix::Zero(kN, kN);
  for (Index k = 0; k < kN; ++k) d(k, k) = 1.0 / static_cast<double>(k + 1);
  const double g1 = brute_force_gamma(ForwardOperator::dense(d), 1, IndexSetFamily::all_subsets).gamma.value();
  report(3, "gamma_n nondecreasing; diag(1/k) gives gamma_1 >= 0.9 N", mono && g1 >= 0.9 * kN,
         std::string(mono ? "monotone" : "NOT monotone") + ", gamma_1 = " + str(g1));
}

struct ViCase {
  std::string name;
  ForwardOperator op;
  TruncatedSequence xdag;
  IndexSetFamily family;
  Index n_max;
  double c;
};

void variational_inequality() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ViCase> cases;
  {
    Vector v = Vector::Zero(10);
    v[1] = 2.0;
    v[4] = -1.0;
    v[7] = 0.3;
    cases.push_back({"identity sparse", ForwardOperator::dense(Matrix::Identity(10, 10)), TruncatedSequence(v),
                     IndexSetFamily::all_subsets, 10, 0.5});
  }
  cases.push_back({"identity power decay", ForwardOperator::dense(Matrix::Identity(12, 12)), power_decay(12, 1.5),
                   IndexSetFamily::prefix, 12, 0.5});
  for (double q : {1.5, 2.0, 4.0, kInfinity})
    cases.push_back({"embedding q=" + str(q), ForwardOperator::lq_embedding(16, q), power_decay(16, 2.0),
                     IndexSetFamily::prefix, 16, 0.5});
  for (std::uint64_t s = 0; s < 2; ++s)
    cases.push_back({"gaussian 60x6 all-subsets", ForwardOperator::dense(oracle::random_matrix(60, 6, 500 + s)),
                     power_decay(6, 1.0), IndexSetFamily::all_subsets, 3, 0.95});
  for (std::uint64_t s = 0; s < 2; ++s)
    cases.push_back({"gaussian 80x8 prefix", ForwardOperator::dense(oracle::random_matrix(80, 8, 600 + s)),
                     power_decay(8, 2.0), IndexSetFamily::prefix, 8, 0.95});

  double worst = kInfinity;
  std::string worst_name;
  bool ok = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const GammaTable t = assemble_assumption(c.op, c.family, c.n_max, c.c);
    const RateFunction phi = build_phi(c.xdag, t);
    ViSamplerConfig sc;
    sc.samples = 10000;
    sc.seed = 1000 + i;
    const ViReport r = check_vi(c.op, c.xdag, compute_beta(t.c_used), phi, sc);
    if (r.samples_tested != 10000) ok = false;
    if (r.worst_slack < worst) {
      worst = r.worst_slack;
      worst_name = c.name;
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && cases.size() == 10 && worst >= -1e-9 && secs < 120.0;
  report(4, "variational inequality on certified configurations", ok,
         std::to_string(cases.size()) + " configs x 1e4 samples, worst slack " + str(worst) + " (" + worst_name +
             "), " + str(secs) + " s");
}

void phi_shape() {
  bool ok = true;
  double worst_shape = 0.0, worst_oracle = 0.0;
  auto table = [](const std::vector<double>& g, double c, IndexSetFamily f) {
    GammaTable t;
    t.family = f;
    t.c_used = c;
    for (std::size_t i = 0; i < g.size(); ++i) t.entries.push_back({static_cast<Index>(i + 1), g[i], GammaMethod::analytic});
    return t;
  };
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 6; ++trial) {
    const IndexSetFamily fam = trial % 2 ? IndexSetFamily::all_subsets : IndexSetFamily::prefix;
    const Index dim = 10;
    Vector v = gaussian(dim, rng);
    for (Index k = 0; k < dim; ++k) v[k] *= std::pow(static_cast<double>(k + 1), -1.5);
    std::vector<double> g;
    double run = 0.0;
    std::uniform_real_distribution<double> inc(0.2, 2.0);
    for (Index n = 0; n < dim; ++n) g.push_back(run += inc(rng));
    const double c = 0.1 * trial;
    const GammaTable t = table(g, c, fam);
    const RateFunction phi = build_phi(TruncatedSequence(v), t);
    if (phi(0.0) != 0.0) ok = false;
    const double hi = 2.0;
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double s = hi * i / 1000.0;
      const double val = phi(s);
      worst_shape = std::max(worst_shape, prev - val);
      prev = val;
      if (i > 0 && i < 1000) {
        const double l = phi(hi * (i - 1) / 1000.0), r = phi(hi * (i + 1) / 1000.0);
        worst_shape = std::max(worst_shape, 0.5 * (l + r) - val);
      }
    }
    std::vector<double> tails;
    for (Index n = 1; n <= dim; ++n) {
      double tail = 0.0;
      if (fam == IndexSetFamily::prefix)
        for (Index k = n; k < dim; ++k) tail += std::abs(v[k]);
      else
        tail = oracle::tail_by_subsets(v, static_cast<int>(n));
      tails.push_back(tail);
    }
    for (int i = 0; i < 20; ++i) {
      const double s = std::pow(10.0, -5.0 + 5.0 * i / 19.0);
      worst_oracle = std::max(worst_oracle, std::abs(phi(s) - oracle::phi_scan(tails, g, c, s)));
    }
  }
  ok = ok && worst_shape <= 1e-12 && worst_oracle <= 1e-12;
  report(5, "phi monotone, concave, phi(0)=0, matches scan oracle", ok,
         "shape defect " + str(worst_shape) + ", oracle diff " + str(worst_oracle));
}

void solver_accuracy() {
  std::mt19937_64 rng(66);
  double st = 0.0, kkt = 0.0, grid_gap = -kInfinity;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector y = gaussian(16, rng);
    const double alpha = 0.05 + 0.3 * trial;
    const SolveResult r = solve_tikhonov({ForwardOperator::dense(Matrix::Identity(16, 16)), y, alpha, 2});
    for (Index k = 0; k < 16; ++k) st = std::max(st, std::abs(r.x.coeffs[k] - oracle::scalar_l1_min(y[k], alpha)));
    kkt = std::max(kkt, r.diagnostics.kkt_residual);
  }
  for (int dim = 2; dim <= 4; ++dim) {
    const Matrix a = oracle::random_matrix(dim + 1, dim, 700 + dim);
    const Vector y = gaussian(dim + 1, rng);
    const TikhonovProblem prob{ForwardOperator::dense(a), y, 0.4, 2};
    const SolveResult r = solve_tikhonov(prob);
    kkt = std::max(kkt, r.diagnostics.kkt_residual);
    const double step = dim == 2 ? 1e-3 : dim == 3 ? 1e-2 : 4e-2;
    const double bound = dim == 4 ? 1.6 : 2.0;
    const double g = oracle::grid_min([&](const Vector& x) { return prob.objective(x); }, dim, -bound, bound, step);
    grid_gap = std::max(grid_gap, r.diagnostics.final_objective - g);
  }
  const bool ok = st <= 1e-10 && kkt <= 1e-10 && grid_gap <= 1e-6;
  report(6, "solver: soft threshold, grid search, KKT", ok,
         "soft-threshold err " + str(st) + ", F - grid min " + str(grid_gap) + ", KKT " + str(kkt));
}

void sparse_slope() {
  ExperimentConfig cfg(ForwardOperator::dense(Matrix::Identity(32, 32)), TruncatedSequence::zeros(32));
  cfg.xdag.coeffs[2] = 1.0;
  cfg.xdag.coeffs[9] = -0.6;
  cfg.xdag.coeffs[20] = 0.3;
  cfg.delta_grid = DeltaGrid{1e-4, 1e-1, 8};
  cfg.trials = 5;
  cfg.alpha_rule.kappa = 1.0;
  cfg.seed = 42;
  const ExperimentResult r = run_rate_experiment(cfg);
  report(7, "sparse x-dagger: linear rate", r.failed_cells == 0 && r.slope >= 0.9 && r.slope <= 1.1,
         "slope " + str(r.slope) + ", failed cells " + std::to_string(r.failed_cells));
}

void power_decay_rate() {
  ExperimentConfig cfg(ForwardOperator::lq_embedding(200, 2.0), power_decay(200, 2.0));
  cfg.family = IndexSetFamily::prefix;
  cfg.seed = 42;
  const ExperimentResult r = run_rate_experiment(cfg);
  const bool ok = r.failed_cells == 0 && r.max_ratio <= 10.0 && r.slope <= 0.95;
  report(8, "power-decay x-dagger: error within phi, sublinear", ok,
         "max error/phi " + str(r.max_ratio) + ", slope " + str(r.slope));
}

void nazarov() {
  Index violations = 0;
  std::string detail;
  const std::vector<std::pair<double, Index>> cases = {{0.5, 3}, {0.25, 3}, {0.5, 5}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    NazarovConfig c;
    c.e = {{0.0, cases[i].first}};
    c.n = cases[i].second;
    c.trials = 1000;
    c.seed = 900 + i;
    const NazarovReport r = nazarov_check(c);
    violations += r.violations + (r.trials == 1000 ? 0 : 1);
    detail += "|E|=" + str(cases[i].first) + " n=" + std::to_string(cases[i].second) + " max ratio " +
              str(r.max_ratio) + " bound " + str(r.bound) + "; ";
  }
  NazarovConfig one;
  one.e = {{0.0, 0.5}};
  one.n = 1;
  one.trials = 1000;
  const NazarovReport r1 = nazarov_check(one);
  detail += "n=1 deviation " + str(r1.max_unit_deviation);
  report(9, "Nazarov-type bound", violations == 0 && r1.violations == 0 && r1.max_unit_deviation <= 1e-12, detail);
}

void cli_determinism() {
  const fs::path base = fs::temp_directory_path() / ("l1rates_acceptance_" + std::to_string(::getpid()));
  const fs::path d1 = base / "a", d2 = base / "b";
  fs::create_directories(d1);
  fs::create_directories(d2);
  auto invoke = [](const fs::path& out) {
    const std::string cmd = std::string("\"") + L1RATES_CLI_PATH + "\" example denoising --seed 42 --out \"" +
                            out.string() + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  const int rc1 = invoke(d1), rc2 = invoke(d2);
  int compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    const fs::path other = d2 / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  fs::remove_all(base);
  report(10, "CLI example output is byte-identical across runs",
         rc1 == 0 && rc2 == 0 && compared > 0 && differing == 0,
         "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) + ", " + std::to_string(compared) +
             " csv files, " + std::to_string(differing) + " differ");
}

}  // namespace

int main() {
  run(1, "embedding gamma_n = n^(1-1/q)", embedding_gammas);
  run(2, "certificate gamma equals injectivity gamma", two_routes_agree);
  run(3, "gamma_n nondecreasing; diag(1/k) gives gamma_1 >= 0.9 N", gamma_monotone);
  run(4, "variational inequality on certified configurations", variational_inequality);
  run(5, "phi monotone, concave, phi(0)=0, matches scan oracle", phi_shape);
  run(6, "solver: soft threshold, grid search, KKT", solver_accuracy);
  run(7, "sparse x-dagger: linear rate", sparse_slope);
  run(8, "power-decay x-dagger: error within phi, sublinear", power_decay_rate);
  run(9, "Nazarov-type bound", nazarov);
  run(10, "CLI example output is byte-identical across runs", cli_determinism);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
