#pragma once

// JSON configuration for operators, x-dagger and experiments. The schema is documented in
// README.md ("Configuration files").

#include "l1rates/experiment.hpp"
#include "l1rates/forward_operator.hpp"
#include "l1rates/nazarov.hpp"
#include "l1rates/rate_function.hpp"
#include "l1rates/tikhonov.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1rates::config {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

/// Number, or one of the strings "inf" / "infinity".
inline double parse_real(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInfinity;
  }
  throw ConfigError(what + ": expected a number or \"inf\"");
}

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline Matrix parse_matrix(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError("operator.matrix: expected a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix a(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ConfigError("operator.matrix: row " + std::to_string(r) + " has the wrong length");
    for (Index c = 0; c < cols; ++c) a(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return a;
}

inline Vector parse_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

inline std::vector<Interval> parse_intervals(const json& j) {
  if (!j.is_array()) throw ConfigError("intervals: expected an array of [a, b) pairs");
  std::vector<Interval> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("intervals: each entry must be [a, b]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

/// Builds a ForwardOperator from {"kind": ..., ...}.
inline ForwardOperator parse_operator(const json& j) {
  const std::string kind = require(j, "kind", "operator").get<std::string>();
  if (kind == "dense-matrix") {
    const std::string norm = j.value("y_norm", std::string("euclidean"));
    const bool any_rank = j.value("allow_rank_deficient", false);
    YNorm y = YNorm::euclidean;
    double q = 2.0;
    if (norm == "lq") {
      y = YNorm::lq;
      q = parse_real(require(j, "q", "operator"), "operator.q");
    } else if (norm != "euclidean") {
      throw ConfigError("operator.y_norm must be \"euclidean\" or \"lq\" for dense matrices");
    }
    Matrix a = parse_matrix(require(j, "matrix", "operator"));
    return any_rank ? ForwardOperator::dense_any_rank(std::move(a), y, q) : ForwardOperator::dense(std::move(a), y, q);
  }
  if (kind == "lq-embedding") {
    const Index n = require(j, "N", "operator").get<Index>();
    return ForwardOperator::lq_embedding(n, parse_real(require(j, "q", "operator"), "operator.q"));
  }
  if (kind == "wiener-restriction" || kind == "wiener-multiplication") {
    const auto e = parse_intervals(require(j, "intervals", "operator"));
    const long grid = j.value("grid_size", 4096L);
    const long fmin = j.value("freq_min", -20L);
    const long fmax = j.value("freq_max", 20L);
    if (kind == "wiener-restriction") return ForwardOperator::wiener_restriction(e, grid, fmin, fmax);
    Vector g;
    const json& wg = require(j, "weight_g", "operator");
    if (wg.is_string()) {
      if (wg.get<std::string>() != "one") throw ConfigError("operator.weight_g: only the tag \"one\" is known");
      g = Vector::Ones(grid);
    } else {
      g = parse_vector(wg, "operator.weight_g");
    }
    return ForwardOperator::wiener_multiplication(e, std::move(g), grid, fmin, fmax);
  }
  throw ConfigError("unknown operator kind '" + kind + "'");
}

/// x-dagger: {"type": "sparse" | "power-decay" | "explicit", ...}; n is the operator dimension.
inline TruncatedSequence parse_xdag(const json& j, Index n, long origin = 0) {
  const std::string type = require(j, "type", "xdag").get<std::string>();
  if (type == "explicit") {
    Vector v = parse_vector(require(j, "values", "xdag"), "xdag.values");
    if (v.size() != n) throw DimensionMismatch("xdag.values", n, v.size());
    return TruncatedSequence(std::move(v), origin);
  }
  if (type == "sparse") {
    const auto supp = require(j, "support", "xdag").get<std::vector<Index>>();
    const auto vals = require(j, "values", "xdag").get<std::vector<double>>();
    if (supp.size() != vals.size()) throw ConfigError("xdag: support and values differ in length");
    Vector v = Vector::Zero(n);
    for (std::size_t i = 0; i < supp.size(); ++i) {
      if (supp[i] < 0 || supp[i] >= n) throw ConfigError("xdag: support index out of range");
      v[supp[i]] = vals[i];
    }
    return TruncatedSequence(std::move(v), origin);
  }
  if (type == "power-decay") {
    const double mu = require(j, "mu", "xdag").get<double>();
    const double scale = j.value("scale", 1.0);
    Vector v(n);
    for (Index k = 0; k < n; ++k) v[k] = scale * std::pow(static_cast<double>(k + 1), -mu);
    return TruncatedSequence(std::move(v), origin);
  }
  throw ConfigError("unknown xdag type '" + type + "'");
}

inline AlphaRule parse_alpha_rule(const json& j) {
  AlphaRule r;
  r.kind = l1rates::parse_alpha_rule(j.value("rule", std::string("a-priori")));
  r.kappa = j.value("kappa", r.kappa);
  r.tau = j.value("tau", r.tau);
  r.ratio = j.value("ratio", r.ratio);
  r.alpha_min = j.value("alpha_min", r.alpha_min);
  r.max_steps = j.value("max_steps", r.max_steps);
  return r;
}

inline SolverOptions parse_solver(const json& j) {
  SolverOptions o;
  o.tol = j.value("tol", o.tol);
  o.max_iter = j.value("max_iter", o.max_iter);
  return o;
}

inline DeltaGrid parse_delta_grid(const json& j) {
  DeltaGrid g;
  g.min = j.value("min", g.min);
  g.max = j.value("max", g.max);
  g.count = j.value("count", g.count);
  return g;
}

inline AssembleOptions parse_assemble(const json& root) {
  AssembleOptions o;
  if (root.contains("method")) o.method = parse_gamma_method(root.at("method").get<std::string>());
  o.budget = root.value("budget", o.budget);
  o.tol_eq = root.value("tol_eq", o.tol_eq);
  return o;
}

/// Full experiment description; `seed_override` replaces the config seed when set.
inline ExperimentConfig parse_experiment(const json& root, std::optional<std::uint64_t> seed_override = {}) {
  ExperimentConfig cfg{ForwardOperator::lq_embedding(1, 2.0), TruncatedSequence::zeros(1)};
  cfg.op = parse_operator(require(root, "operator", "config"));
  cfg.xdag = parse_xdag(require(root, "xdag", "config"), cfg.op.domain_dim(), cfg.op.index_origin());
  cfg.family = parse_family(root.value("family", std::string("all-subsets")));
  cfg.c_target = root.value("c_target", cfg.c_target);
  if (root.contains("n_max")) cfg.n_max = root.at("n_max").get<Index>();
  if (root.contains("delta_grid")) cfg.delta_grid = parse_delta_grid(root.at("delta_grid"));
  cfg.trials = root.value("trials", cfg.trials);
  if (root.contains("alpha_rule")) cfg.alpha_rule = parse_alpha_rule(root.at("alpha_rule"));
  cfg.p = root.value("p", cfg.p);
  cfg.seed = seed_override ? *seed_override : root.value("seed", std::uint64_t{0});
  if (root.contains("solver")) cfg.solver = parse_solver(root.at("solver"));
  cfg.assemble = parse_assemble(root);
  return cfg;
}

inline ViSamplerConfig parse_vi(const json& j, std::uint64_t seed) {
  ViSamplerConfig c;
  c.samples = j.value("samples", c.samples);
  c.scale_min = j.value("scale_min", c.scale_min);
  c.scale_max = j.value("scale_max", c.scale_max);
  c.scale_count = j.value("scale_count", c.scale_count);
  c.tol_vi = j.value("tol_vi", c.tol_vi);
  c.seed = seed;
  return c;
}

inline NazarovConfig parse_nazarov(const json& j, std::uint64_t seed) {
  NazarovConfig c;
  c.e = parse_intervals(require(j, "intervals", "nazarov"));
  c.n = require(j, "n", "nazarov").get<Index>();
  c.trials = j.value("trials", c.trials);
  c.freq_min = j.value("freq_min", c.freq_min);
  c.freq_max = j.value("freq_max", c.freq_max);
  c.grid_size = j.value("grid_size", c.grid_size);
  c.seed = seed;
  return c;
}

}  // namespace l1rates::config
