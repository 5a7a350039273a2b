#pragma once

#include "l1rates/certificates.hpp"
#include "l1rates/forward_operator.hpp"
#include "l1rates/rate_function.hpp"
#include "l1rates/sequence.hpp"
#include "l1rates/tikhonov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace l1rates {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of cell (delta index, trial): seed xor hash(delta index, trial).
inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t delta_index, std::size_t trial) {
  return seed ^ mix64((static_cast<std::uint64_t>(delta_index) << 32) ^ static_cast<std::uint64_t>(trial));
}

/// y + e with e a random direction rescaled to ||e||_Y = delta. For the restriction operator
/// only grid points in E carry noise, as the data vanish elsewhere.
inline DataVector synthesize_noise(const ForwardOperator& op, const DataVector& y, double delta,
                                   std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  if (y.size() != op.data_dim()) throw DimensionMismatch("synthesize_noise", op.data_dim(), y.size());
  if (delta == 0.0) return y;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector e(y.size());
  for (Index i = 0; i < e.size(); ++i) e[i] = normal(rng);
  if (op.kind() == OperatorKind::wiener_restriction) {
    const long g = op.grid_size();
    for (long j = 0; j < g; ++j)
      if (op.weight()[j] == 0.0) e[j] = e[g + j] = 0.0;
  }
  const double n = op.norm(e);
  if (n == 0.0) throw std::runtime_error("synthesize_noise: degenerate noise direction");
  return y + (delta / n) * e;
}

/// Strictly decreasing geometric grid from max to min.
struct DeltaGrid {
  double min = 1e-4;
  double max = 1e-1;
  Index count = 8;

  std::vector<double> values() const {
    if (!(min > 0.0) || !(max >= min) || count < 1) throw std::invalid_argument("invalid delta grid");
    if (count > 1 && !(max > min)) throw std::invalid_argument("delta grid must be strictly decreasing");
    std::vector<double> v;
    for (Index i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      v.push_back(max * std::pow(min / max, f));
    }
    return v;
  }
};

struct ExperimentConfig {
  ExperimentConfig(ForwardOperator op_, TruncatedSequence xdag_) : op(std::move(op_)), xdag(std::move(xdag_)) {}

  ForwardOperator op;
  TruncatedSequence xdag;
  IndexSetFamily family = IndexSetFamily::all_subsets;
  double c_target = 0.5;
  std::optional<Index> n_max;  ///< defaults to the length of x-dagger
  DeltaGrid delta_grid;
  Index trials = 5;
  AlphaRule alpha_rule;
  int p = 2;
  std::uint64_t seed = 0;
  SolverOptions solver;
  AssembleOptions assemble;
};

struct ExperimentRecord {
  std::size_t delta_index = 0;
  double delta = 0.0;
  Index trial = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double error_l1 = 0.0;
  double residual = 0.0;
  double phi_of_delta = 0.0;
  SolveDiagnostics diagnostics;
  bool failed = false;
  std::string failure;
};

struct DeltaSummary {
  double delta = 0.0;
  double median_error = 0.0;
  double phi_of_delta = 0.0;
  double ratio = 0.0;  ///< median error / phi(delta)
  Index failures = 0;
};

struct ExperimentResult {
  GammaTable gammas;
  std::optional<RateFunction> phi;
  std::vector<ExperimentRecord> records;
  std::vector<DeltaSummary> per_delta;
  double slope = 0.0;      ///< OLS slope of log median error against log delta
  double max_ratio = 0.0;  ///< max over the grid of median error / phi(delta)
  Index failed_cells = 0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Ordinary least-squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Sweeps the noise grid: per (delta, trial) synthesize y_delta, choose alpha, solve, and
/// compare ||x_alpha - x-dagger||_1 with phi(delta). Cell failures are recorded, not thrown.
inline ExperimentResult run_rate_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (cfg.xdag.size() != cfg.op.domain_dim())
    throw DimensionMismatch("x-dagger", cfg.op.domain_dim(), cfg.xdag.size());
  ExperimentResult res;
  const Index n_max = cfg.n_max.value_or(cfg.xdag.size());
  res.gammas = assemble_assumption(cfg.op, cfg.family, n_max, cfg.c_target, cfg.assemble);
  res.phi.emplace(build_phi(cfg.xdag, res.gammas));
  const DataVector y = cfg.op.apply(cfg.xdag);
  const std::vector<double> deltas = cfg.delta_grid.values();

  std::vector<double> log_d, log_e;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    const double phi_d = (*res.phi)(delta);
    std::vector<double> errors;
    DeltaSummary sum;
    sum.delta = delta;
    sum.phi_of_delta = phi_d;
    for (Index tr = 0; tr < cfg.trials; ++tr) {
      ExperimentRecord rec;
      rec.delta_index = di;
      rec.delta = delta;
      rec.trial = tr;
      rec.seed = cell_seed(cfg.seed, di, static_cast<std::size_t>(tr));
      rec.phi_of_delta = phi_d;
      try {
        const DataVector yd = synthesize_noise(cfg.op, y, delta, rec.seed);
        rec.alpha = choose_alpha(cfg.alpha_rule, delta, cfg.op, yd, cfg.p, cfg.solver);
        const SolveResult sol = solve_tikhonov(TikhonovProblem{cfg.op, yd, rec.alpha, cfg.p}, cfg.solver);
        rec.error_l1 = (sol.x.coeffs - cfg.xdag.coeffs).lpNorm<1>();
        rec.residual = cfg.op.norm(cfg.op.apply(sol.x.coeffs) - yd);
        rec.diagnostics = sol.diagnostics;
        errors.push_back(rec.error_l1);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.failure = e.what();
        ++sum.failures;
        ++res.failed_cells;
      }
      res.records.push_back(std::move(rec));
    }
    sum.median_error = median(errors);
    sum.ratio = phi_d > 0.0 ? sum.median_error / phi_d : std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(sum.ratio)) res.max_ratio = std::max(res.max_ratio, sum.ratio);
    if (sum.median_error > 0.0 && std::isfinite(sum.median_error)) {
      log_d.push_back(std::log(delta));
      log_e.push_back(std::log(sum.median_error));
    }
    res.per_delta.push_back(sum);
  }
  res.slope = ols_slope(log_d, log_e);
  return res;
}

}  // namespace l1rates
