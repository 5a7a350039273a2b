#pragma once

// Canned runs of the two worked examples: the l^1 -> l^q embedding ("denoising") and the
// Wiener-algebra restriction/multiplication operators ("wiener").

#include "l1rates/certificates.hpp"
#include "l1rates/experiment.hpp"
#include "l1rates/io.hpp"
#include "l1rates/nazarov.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace l1rates {

/// Named output files (written in order) plus a JSON summary.
struct ExampleBundle {
  std::string name;
  std::vector<std::pair<std::string, std::string>> files;
  io::json summary;
  bool passed = true;
};

namespace detail {

inline double rel_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline ExampleBundle reproduce_denoising(std::uint64_t seed) {
  ExampleBundle b;
  b.name = "denoising";
  constexpr Index kDim = 12;
  constexpr Index kLevels = 5;
  const std::vector<double> qs = {1.5, 2.0, 4.0, kInfinity};

  std::string gammas = io::csv_preamble() + "q,n,gamma_brute_force,gamma_analytic,rel_error\n";
  std::string inj = io::csv_preamble() + "q,n,gamma,samples,violations,worst_ratio\n";
  double worst_rel = 0.0;
  Index inj_violations = 0;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const double q = qs[qi];
    const ForwardOperator op = ForwardOperator::lq_embedding(kDim, q);
    for (Index n = 1; n <= kLevels; ++n) {
      const double bf = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      const double an = embedding_gamma(q, n);
      const double rel = rel_error(bf, an);
      worst_rel = std::max(worst_rel, rel);
      gammas += io::fmt(q) + "," + std::to_string(n) + "," + io::fmt(bf) + "," + io::fmt(an) + "," + io::fmt(rel) + "\n";
      const InjectivityReport r =
          check_restricted_injectivity(op, n, an, 2000, seed ^ mix64((qi << 8) | static_cast<std::uint64_t>(n)));
      inj_violations += r.violations;
      inj += io::fmt(q) + "," + std::to_string(n) + "," + io::fmt(an) + "," + std::to_string(r.samples) + "," +
             std::to_string(r.violations) + "," + io::fmt(r.worst_ratio) + "\n";
    }
  }

  // Upper half of the chain: ||x||_q <= ||x||_1.
  std::string chain = io::csv_preamble() + "q,samples,violations,max_ratio\n";
  Index chain_violations = 0;
  {
    std::mt19937_64 rng(seed ^ 0x636861696eULL);
    std::normal_distribution<double> normal;
    for (double q : qs) {
      Index viol = 0;
      double worst = 0.0;
      for (int s = 0; s < 10000; ++s) {
        Vector x(kDim);
        for (Index k = 0; k < kDim; ++k) x[k] = normal(rng);
        const double ratio = lq_norm(x, q) / x.lpNorm<1>();
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + 1e-12) ++viol;
      }
      chain_violations += viol;
      chain += io::fmt(q) + ",10000," + std::to_string(viol) + "," + io::fmt(worst) + "\n";
    }
  }

  // Rate experiment: x-dagger_k = k^{-2} under the l^2 embedding.
  ExperimentConfig cfg{ForwardOperator::lq_embedding(200, 2.0), TruncatedSequence::zeros(200)};
  for (Index k = 0; k < 200; ++k) cfg.xdag.coeffs[k] = std::pow(static_cast<double>(k + 1), -2.0);
  cfg.family = IndexSetFamily::prefix;
  cfg.c_target = 0.5;
  cfg.seed = seed;
  const ExperimentResult res = run_rate_experiment(cfg);

  b.files.emplace_back("gammas.csv", gammas);
  b.files.emplace_back("injectivity.csv", inj);
  b.files.emplace_back("chain.csv", chain);
  b.files.emplace_back("phi.csv", io::phi_csv(*res.phi));
  b.files.emplace_back("records.csv", io::records_csv(res.records));

  const bool gamma_ok = worst_rel <= 1e-9;
  const bool rates_ok = res.failed_cells == 0 && std::isfinite(res.max_ratio);
  b.passed = gamma_ok && inj_violations == 0 && chain_violations == 0 && rates_ok;
  b.summary = {{"example", "denoising"},
               {"seed", seed},
               {"gamma_max_rel_error", io::num(worst_rel)},
               {"injectivity_violations", inj_violations},
               {"chain_violations", chain_violations},
               {"rate_experiment", io::summary_json(res)},
               {"passed", b.passed}};
  return b;
}

/// Weight used for the multiplication operator: 1 on E, 0.1 + 0.8 |sin 2 pi t| elsewhere.
inline Vector wiener_weight(const std::vector<Interval>& e, long grid_size) {
  const CircleGrid grid(grid_size);
  const std::vector<char> mask = grid.mask(e);
  Vector g(grid_size);
  for (long j = 0; j < grid_size; ++j)
    g[j] = mask[static_cast<std::size_t>(j)] ? 1.0 : 0.1 + 0.8 * std::abs(std::sin(2.0 * std::numbers::pi * grid.point(j)));
  return g;
}

inline ExampleBundle reproduce_wiener(std::uint64_t seed) {
  ExampleBundle b;
  b.name = "wiener";
  const std::vector<Interval> e = {{0.0, 0.25}, {0.5, 0.75}};
  constexpr long kGrid = 4096;
  constexpr long kFmin = -20;
  constexpr long kFmax = 20;
  constexpr Index kLevels = 3;
  const ForwardOperator a_e = ForwardOperator::wiener_restriction(e, kGrid, kFmin, kFmax);
  const ForwardOperator a_g = ForwardOperator::wiener_multiplication(e, wiener_weight(e, kGrid), kGrid, kFmin, kFmax);
  const ForwardOperator a_one =
      ForwardOperator::wiener_multiplication(e, Vector::Ones(kGrid), kGrid, kFmin, kFmax);
  const double me = a_e.measure_E();

  GammaTable table;
  table.family = IndexSetFamily::all_subsets;
  table.method = GammaMethod::analytic;
  table.c_used = std::numeric_limits<double>::quiet_NaN();
  for (Index n = 1; n <= kLevels; ++n) table.entries.push_back({n, nazarov_gamma(me, n), GammaMethod::analytic});

  // (1/gamma_n)||x||_1 <= ||A_E x|| <= ||A_g x|| <= ||L x||_inf <= ||x||_1, samplewise.
  std::string chain = io::csv_preamble() + "sample,n,lower,restriction,multiplication,sup_circle,l1,holds\n";
  Index chain_violations = 0;
  std::mt19937_64 rng(seed ^ 0x77696e6572ULL);
  std::normal_distribution<double> normal;
  const Index dim = a_e.domain_dim();
  std::uniform_int_distribution<Index> pos(0, dim - 1);
  constexpr int kSamples = 300;
  for (int s = 0; s < kSamples; ++s) {
    const Index n = 1 + s % kLevels;
    Vector x = Vector::Zero(dim);
    for (Index placed = 0; placed < n;) {
      const Index k = pos(rng);
      if (x[k] != 0.0) continue;
      x[k] = normal(rng);
      ++placed;
    }
    const double l1 = x.lpNorm<1>();
    const double lower = l1 / table.gamma(n);
    const double re = a_e.norm(a_e.apply(x));
    const double mg = a_g.norm(a_g.apply(x));
    const double sup = a_one.norm(a_one.apply(x));
    const double slack = 1e-12 * l1;
    const bool ok = lower <= re + slack && re <= mg + slack && mg <= sup + slack && sup <= l1 + slack;
    if (!ok) ++chain_violations;
    chain += std::to_string(s) + "," + std::to_string(n) + "," + io::fmt(lower) + "," + io::fmt(re) + "," + io::fmt(mg) +
             "," + io::fmt(sup) + "," + io::fmt(l1) + "," + (ok ? "1" : "0") + "\n";
  }

  std::string inj = io::csv_preamble() + "operator,n,gamma,samples,violations,worst_ratio\n";
  Index inj_violations = 0;
  for (Index n = 1; n <= kLevels; ++n) {
    for (const ForwardOperator* op : {&a_e, &a_g}) {
      const InjectivityReport r = check_restricted_injectivity(*op, n, table.gamma(n), 500, seed ^ mix64(static_cast<std::uint64_t>(n)));
      inj_violations += r.violations;
      inj += std::string(to_string(op->kind())) + "," + std::to_string(n) + "," + io::fmt(table.gamma(n)) + "," +
             std::to_string(r.samples) + "," + std::to_string(r.violations) + "," + io::fmt(r.worst_ratio) + "\n";
    }
  }

  std::string naz = io::nazarov_csv_header();
  Index naz_violations = 0;
  double unit_dev = 0.0;
  io::json naz_json = io::json::array();
  const std::vector<std::pair<double, Index>> cases = {{0.5, 1}, {0.5, 3}, {0.25, 3}, {0.5, 5}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    NazarovConfig nc;
    nc.e = {{0.0, cases[i].first}};
    nc.n = cases[i].second;
    nc.trials = 1000;
    nc.freq_min = -30;
    nc.freq_max = 30;
    nc.grid_size = kGrid;
    nc.seed = seed ^ mix64(0x6e617a0000ULL + i);
    const NazarovReport r = nazarov_check(nc);
    naz_violations += r.violations + r.upper_violations;
    if (r.n == 1) unit_dev = std::max(unit_dev, r.max_unit_deviation);
    naz += io::nazarov_csv_row(r);
    naz_json.push_back(io::to_json(r));
  }

  b.files.emplace_back("gammas.csv", io::gamma_table_csv(table));
  b.files.emplace_back("chain.csv", chain);
  b.files.emplace_back("injectivity.csv", inj);
  b.files.emplace_back("nazarov.csv", naz);
  b.passed = chain_violations == 0 && inj_violations == 0 && naz_violations == 0 && unit_dev <= 1e-12;
  b.summary = {{"example", "wiener"},
               {"seed", seed},
               {"measure_E", io::num(me)},
               {"grid_measure_E", io::num(a_e.grid_measure_E())},
               {"chain_samples", kSamples},
               {"chain_violations", chain_violations},
               {"injectivity_violations", inj_violations},
               {"nazarov", naz_json},
               {"nazarov_unit_deviation", io::num(unit_dev)},
               {"passed", b.passed}};
  return b;
}

}  // namespace detail

/// Runs the canned configuration "denoising" or "wiener".
inline ExampleBundle reproduce_example(std::string_view name, std::uint64_t seed = 0) {
  if (name == "denoising") return detail::reproduce_denoising(seed);
  if (name == "wiener") return detail::reproduce_wiener(seed);
  throw std::invalid_argument("unknown example '" + std::string(name) + "' (expected denoising or wiener)");
}

}  // namespace l1rates
