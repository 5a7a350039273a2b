#pragma once

#include "l1rates/certificates.hpp"
#include "l1rates/experiment.hpp"
#include "l1rates/nazarov.hpp"
#include "l1rates/rate_function.hpp"
#include "l1rates/tikhonov.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace l1rates::io {

using json = nlohmann::json;

/// Version of every CSV table written by this library; emitted as the first line.
inline constexpr int kCsvSchemaVersion = 1;

/// Shortest round-trip formatting; "inf"/"nan" for non-finite values.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline std::string csv_preamble() { return "# schema_version=" + std::to_string(kCsvSchemaVersion) + "\n"; }

/// JSON cannot carry inf/nan; map them to strings.
inline json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

inline std::string gamma_table_csv(const GammaTable& t) {
  std::string out = csv_preamble() + "n,gamma,c,method\n";
  for (const auto& e : t.entries)
    out += std::to_string(e.n) + "," + fmt(e.gamma) + "," + fmt(t.c_used) + "," + std::string(to_string(e.method)) + "\n";
  return out;
}

inline json to_json(const GammaTable& t) {
  json rows = json::array();
  for (const auto& e : t.entries)
    rows.push_back({{"n", e.n}, {"gamma", num(e.gamma)}, {"method", std::string(to_string(e.method))}});
  return {{"family", std::string(to_string(t.family))},
          {"c", num(t.c_used)},
          {"method", std::string(to_string(t.method))},
          {"entries", rows}};
}

inline std::string phi_csv(const RateFunction& phi) {
  std::string out = csv_preamble() + "t_break,phi_value,active_n\n";
  for (const auto& p : phi.envelope())
    out += fmt(p.t_start) + "," + fmt(p.intercept + p.slope * p.t_start) + "," + std::to_string(p.n) + "\n";
  return out;
}

inline json to_json(const RateFunction& phi) {
  json rows = json::array();
  for (const auto& p : phi.envelope())
    rows.push_back({{"t_break", num(p.t_start)}, {"phi_value", num(p.intercept + p.slope * p.t_start)}, {"active_n", p.n}});
  return {{"c", num(phi.c())}, {"family", std::string(to_string(phi.family()))}, {"breakpoints", rows}};
}

inline json to_json(const TruncatedSequence& x) {
  json c = json::array();
  for (Index k = 0; k < x.size(); ++k) c.push_back(num(x.coeffs[k]));
  return {{"index_origin", x.index_origin}, {"coeffs", c}};
}

inline json to_json(const ViReport& r) {
  json j = {{"beta", num(r.beta)},
            {"samples_tested", r.samples_tested},
            {"worst_slack", num(r.worst_slack)},
            {"worst_kind", std::string(to_string(r.worst_kind))},
            {"tol_vi", num(r.tol_vi)},
            {"seed", r.seed},
            {"holds", r.holds()}};
  j["violating_x"] = r.violating_x ? to_json(*r.violating_x) : json(nullptr);
  return j;
}

inline json to_json(const SolveDiagnostics& d) {
  return {{"method", d.method},
          {"iterations", d.iterations},
          {"final_objective", num(d.final_objective)},
          {"kkt_residual", num(d.kkt_residual)},
          {"support_size", d.support_size},
          {"restarts", d.restarts},
          {"polished", d.polished}};
}

inline json to_json(const SolveResult& r) { return {{"x", to_json(r.x)}, {"diagnostics", to_json(r.diagnostics)}}; }

inline std::string records_csv(const std::vector<ExperimentRecord>& recs) {
  std::string out = csv_preamble() +
                    "delta_index,delta,trial,seed,alpha,error_l1,residual,phi_of_delta,iterations,"
                    "kkt_residual,support_size,failed\n";
  for (const auto& r : recs) {
    out += std::to_string(r.delta_index) + "," + fmt(r.delta) + "," + std::to_string(r.trial) + "," +
           std::to_string(r.seed) + "," + fmt(r.alpha) + "," + fmt(r.error_l1) + "," + fmt(r.residual) + "," +
           fmt(r.phi_of_delta) + "," + std::to_string(r.diagnostics.iterations) + "," +
           fmt(r.diagnostics.kkt_residual) + "," + std::to_string(r.diagnostics.support_size) + "," +
           (r.failed ? "1" : "0") + "\n";
  }
  return out;
}

inline json records_json(const std::vector<ExperimentRecord>& recs) {
  json rows = json::array();
  for (const auto& r : recs) {
    rows.push_back({{"delta_index", r.delta_index},
                    {"delta", num(r.delta)},
                    {"trial", r.trial},
                    {"seed", r.seed},
                    {"alpha", num(r.alpha)},
                    {"error_l1", num(r.error_l1)},
                    {"residual", num(r.residual)},
                    {"phi_of_delta", num(r.phi_of_delta)},
                    {"diagnostics", to_json(r.diagnostics)},
                    {"failed", r.failed},
                    {"failure", r.failure}});
  }
  return rows;
}

inline json summary_json(const ExperimentResult& r) {
  json per = json::array();
  for (const auto& d : r.per_delta)
    per.push_back({{"delta", num(d.delta)},
                   {"median_error", num(d.median_error)},
                   {"phi_of_delta", num(d.phi_of_delta)},
                   {"ratio", num(d.ratio)},
                   {"failures", d.failures}});
  return {{"slope", num(r.slope)},
          {"max_ratio", num(r.max_ratio)},
          {"failed_cells", r.failed_cells},
          {"per_delta", per},
          {"gammas", to_json(r.gammas)}};
}

inline json to_json(const NazarovReport& r) {
  return {{"measure_E", num(r.measure_e)},
          {"grid_measure_E", num(r.grid_measure_e)},
          {"n", r.n},
          {"bound", num(r.bound)},
          {"sharp_bound", num(r.sharp_bound)},
          {"trials", r.trials},
          {"violations", r.violations},
          {"max_ratio", num(r.max_ratio)},
          {"min_ratio", num(r.min_ratio)},
          {"max_unit_deviation", num(r.max_unit_deviation)},
          {"upper_violations", r.upper_violations}};
}

inline std::string nazarov_csv_header() {
  return csv_preamble() + "measure_E,n,trials,bound,max_ratio,min_ratio,violations,upper_violations\n";
}

inline std::string nazarov_csv_row(const NazarovReport& r) {
  return fmt(r.measure_e) + "," + std::to_string(r.n) + "," + std::to_string(r.trials) + "," + fmt(r.bound) + "," +
         fmt(r.max_ratio) + "," + fmt(r.min_ratio) + "," + std::to_string(r.violations) + "," +
         std::to_string(r.upper_violations) + "\n";
}

inline json to_json(const InjectivityReport& r) {
  return {{"samples", r.samples},
          {"violations", r.violations},
          {"bound", num(r.bound)},
          {"worst_ratio", num(r.worst_ratio)}};
}

inline json to_json(const CertificateReport& r) {
  json eta = json::array();
  for (Index i = 0; i < r.eta.size(); ++i) eta.push_back(num(r.eta[i]));
  return {{"support", r.xi.support()},
          {"signs", r.xi.signs()},
          {"eta", eta},
          {"eta_norm", num(r.eta_norm)},
          {"on_support_residual", num(r.on_support_residual)},
          {"off_support_sup", num(r.off_support_sup)},
          {"c_target", num(r.c_target)},
          {"passed", r.passed}};
}

}  // namespace l1rates::io
