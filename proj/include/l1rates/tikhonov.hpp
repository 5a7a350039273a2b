#pragma once

#include "l1rates/forward_operator.hpp"
#include "l1rates/linalg.hpp"
#include "l1rates/sequence.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1rates {

/// ||A x - y_delta||_Y^p + alpha ||x||_1 -> min.
struct TikhonovProblem {
  ForwardOperator op;
  DataVector y_delta;
  double alpha = 1.0;
  int p = 2;

  double objective(const Vector& x) const {
    return std::pow(op.norm(op.apply(x) - y_delta), p) + alpha * x.lpNorm<1>();
  }
};

struct SolveDiagnostics {
  Index iterations = 0;
  double final_objective = 0.0;
  double kkt_residual = kInfinity;
  Index support_size = 0;
  Index restarts = 0;
  bool polished = false;
  std::string method;
  /// Objective at every momentum restart and at termination; nonincreasing.
  std::vector<double> checkpoints;
};

struct SolveResult {
  TruncatedSequence x;
  SolveDiagnostics diagnostics;
};

/// Iteration budget exhausted before the KKT tolerance was met. Carries the best iterate.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolveResult& best() const noexcept { return best_; }

 private:
  SolveResult best_;
};

struct SolverOptions {
  double tol = 1e-10;
  Index max_iter = 100000;
  /// Try the exact reduced system on the current support once it has settled.
  bool polish = true;
  Index polish_every = 25;
};

/// sign(v_i) max(|v_i| - tau, 0).
inline Vector soft_threshold(const Vector& v, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be nonnegative");
  return v.array().sign() * (v.array().abs() - tau).max(0.0);
}

namespace detail {

/// KKT residual for p = 2 with r = A x - y:
/// max over the support of |2 [A^T r]_k / alpha + sgn x_k| and over the rest of
/// max(0, |[A^T r]_k| - alpha / 2).
inline double kkt_residual_l2(const Vector& grad_half, const Vector& x, double alpha) {
  double res = 0.0;
  for (Index k = 0; k < x.size(); ++k) {
    const double g = grad_half[k];
    if (x[k] != 0.0) {
      const double s = x[k] > 0 ? 1.0 : -1.0;
      res = std::max(res, std::abs(2.0 * g / alpha + s));
    } else {
      res = std::max(res, std::abs(g) - alpha / 2.0);
    }
  }
  return std::max(res, 0.0);
}

/// Solves the stationarity system on a fixed support and sign pattern:
/// 2 A_S^T (A_S x_S - y) + alpha s = 0. Returns nothing if the signs do not survive.
inline std::optional<Vector> polish_on_support(const Matrix& a, const Vector& y, const Vector& x, double alpha) {
  std::vector<Index> supp;
  for (Index k = 0; k < x.size(); ++k)
    if (x[k] != 0.0) supp.push_back(k);
  if (supp.empty()) return std::nullopt;
  const Matrix as = linalg::select_columns(a, supp);
  const Eigen::LDLT<Matrix> ldlt(as.transpose() * as);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  Vector s(static_cast<Index>(supp.size()));
  for (std::size_t i = 0; i < supp.size(); ++i) s[static_cast<Index>(i)] = x[supp[i]] > 0 ? 1.0 : -1.0;
  const Vector xs = ldlt.solve(as.transpose() * y - 0.5 * alpha * s);
  Vector out = Vector::Zero(x.size());
  for (std::size_t i = 0; i < supp.size(); ++i) {
    const double v = xs[static_cast<Index>(i)];
    if (v * s[static_cast<Index>(i)] <= 0.0) return std::nullopt;
    out[supp[i]] = v;
  }
  return out;
}

inline Index support_size(const Vector& x) { return (x.array() != 0.0).count(); }

/// Objective comparisons below this relative size are rounding noise.
inline constexpr double kRoundoff = 1e-14;

/// Accelerated proximal gradient with function-value restart, p = 2 and a euclidean norm.
/// A step is accepted only if it does not increase the objective; otherwise momentum is
/// reset and a plain proximal step from the last iterate is taken, so F never increases.
inline SolveResult solve_fista(const TikhonovProblem& prob, const SolverOptions& opt) {
  const Matrix& a = prob.op.matrix();
  const Vector& y = prob.y_delta;
  const double alpha = prob.alpha;
  const linalg::PowerIteration pw = linalg::largest_gram_eigenvalue(a, 1e-10, 10000);
  double lip = 2.0 * pw.value * (1.0 + 1e-8);
  if (lip == 0.0) lip = 1.0;

  auto smooth = [&](const Vector& x) { return (a * x - y).squaredNorm(); };
  auto objective = [&](const Vector& x) { return smooth(x) + alpha * x.lpNorm<1>(); };
  auto half_gradient = [&](const Vector& x) -> Vector { return a.transpose() * (a * x - y); };

  SolveResult out;
  out.diagnostics.method = "fista-restart";
  Vector x = Vector::Zero(a.cols());
  Vector yk = x;
  double fx = objective(x);
  double t = 1.0;
  Index settled = 0;
  Index last_support = -1;

  auto finish = [&](Index iters) {
    out.x = TruncatedSequence(x);
    out.diagnostics.iterations = iters;
    out.diagnostics.final_objective = fx;
    out.diagnostics.kkt_residual = kkt_residual_l2(half_gradient(x), x, alpha);
    out.diagnostics.support_size = support_size(x);
    out.diagnostics.checkpoints.push_back(fx);
  };

  if (kkt_residual_l2(half_gradient(x), x, alpha) <= opt.tol) {
    finish(0);
    return out;
  }

  for (Index it = 1; it <= opt.max_iter; ++it) {
    Vector z = soft_threshold(yk - 2.0 * half_gradient(yk) / lip, alpha / lip);
    double fz = objective(z);
    if (fz > fx) {
      ++out.diagnostics.restarts;
      out.diagnostics.checkpoints.push_back(fx);
      t = 1.0;
      // Plain proximal step; backtrack only if the quadratic model fails to majorize.
      const Vector gx = half_gradient(x);
      const double sx = smooth(x);
      for (int bt = 0; bt < 60; ++bt) {
        z = soft_threshold(x - 2.0 * gx / lip, alpha / lip);
        const Vector d = z - x;
        const double model = sx + 2.0 * gx.dot(d) + 0.5 * lip * d.squaredNorm();
        if (smooth(z) <= model + kRoundoff * std::max(1.0, sx)) break;
        lip *= 2.0;
      }
      fz = objective(z);
      if (fz > fx + kRoundoff * std::max(1.0, std::abs(fx))) {
        z = x;
        fz = fx;
      }
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yk = z + ((t - 1.0) / t_next) * (z - x);
    x = std::move(z);
    fx = fz;
    t = t_next;

    const Vector g = half_gradient(x);
    if (kkt_residual_l2(g, x, alpha) <= opt.tol) {
      finish(it);
      return out;
    }
    const Index supp = support_size(x);
    settled = supp == last_support ? settled + 1 : 0;
    last_support = supp;
    if (opt.polish && settled >= opt.polish_every && it % opt.polish_every == 0) {
      if (auto xp = polish_on_support(a, y, x, alpha)) {
        const double fp = objective(*xp);
        if (fp <= fx + kRoundoff * std::max(1.0, std::abs(fx)) && kkt_residual_l2(half_gradient(*xp), *xp, alpha) <= opt.tol) {
          x = std::move(*xp);
          fx = fp;
          out.diagnostics.polished = true;
          finish(it);
          return out;
        }
      }
    }
  }
  finish(opt.max_iter);
  throw SolverError("solve_tikhonov: KKT residual " + std::to_string(out.diagnostics.kkt_residual) +
                        " above tolerance after " + std::to_string(opt.max_iter) + " iterations",
                    out);
}

/// Exact solver for the l^q embedding. Every minimizer lies on the soft-threshold path
/// x(lambda) = soft(y, lambda), whose residual has entries min(|y_k|, lambda). Along the path
/// the objective derivative has the sign of h(lambda) - alpha with
///   h(lambda) = p ||r(lambda)||_q^{p-q} lambda^{q-1}     (q < inf),
/// which is nondecreasing, so the optimum is the root of h = alpha (or lambda = max|y|).
/// For q = inf, G(lambda) = lambda^p + alpha sum_k (|y_k| - lambda)_+ is convex and piecewise
/// smooth; the minimizer is found segment by segment.
inline SolveResult solve_embedding_path(const TikhonovProblem& prob) {
  const Vector& y = prob.y_delta;
  const double alpha = prob.alpha;
  const double q = prob.op.q();
  const int p = prob.p;
  const Vector mag = y.cwiseAbs();
  const double top = mag.size() ? mag.maxCoeff() : 0.0;

  SolveResult out;
  out.diagnostics.method = "soft-threshold-path";
  double lambda = top;
  double residual = 0.0;

  if (top > 0.0) {
    if (std::isinf(q)) {
      std::vector<double> u(mag.data(), mag.data() + mag.size());
      std::sort(u.begin(), u.end(), std::greater<>());
      u.push_back(0.0);
      // On (u[a], u[a-1]) exactly a entries are active: G'(lambda) = p lambda^{p-1} - alpha a.
      lambda = top;
      for (std::size_t a = 1; a < u.size(); ++a) {
        const double hi = u[a - 1];
        const double lo = u[a];
        const double act = static_cast<double>(a);
        // G' at the right end of this segment (approached from the left).
        const double d_hi = (p == 1 ? 1.0 : 2.0 * hi) - alpha * act;
        if (d_hi <= 0.0) {
          lambda = hi;  // minimum at the breakpoint to the right
          break;
        }
        if (p == 2 && 2.0 * lo - alpha * act < 0.0) {
          lambda = std::clamp(0.5 * alpha * act, lo, hi);
          break;
        }
        if (a + 1 == u.size()) lambda = lo;
      }
    } else {
      auto h = [&](double lam) {
        if (lam <= 0.0) return -alpha;
        double s = 0.0;
        for (Index k = 0; k < mag.size(); ++k) s += std::pow(std::min(mag[k], lam) / lam, q);
        // ||r||^{p-q} lambda^{q-1} = lambda^{p-1} (sum (r_k/lambda)^q)^{(p-q)/q}
        return p * std::pow(lam, p - 1) * std::pow(s, (p - q) / q) - alpha;
      };
      if (h(top) > 0.0) {
        boost::uintmax_t iters = 200;
        const auto root = boost::math::tools::toms748_solve(h, 0.0, top, -alpha, h(top),
                                                            boost::math::tools::eps_tolerance<double>(52),
                                                            iters);
        lambda = 0.5 * (root.first + root.second);
        residual = std::abs(root.second - root.first) / std::max(lambda, 1e-300);
        out.diagnostics.iterations = static_cast<Index>(iters);
      }
    }
  }

  const Vector x = soft_threshold(y, lambda);
  out.x = TruncatedSequence(x);
  out.diagnostics.final_objective = prob.objective(x);
  out.diagnostics.kkt_residual = residual;
  out.diagnostics.support_size = support_size(x);
  out.diagnostics.checkpoints.push_back(out.diagnostics.final_objective);
  return out;
}

}  // namespace detail

/// Minimizes the Tikhonov functional. p = 2 with a euclidean data norm runs accelerated
/// proximal gradient; the l^q embedding (any q, p in {1, 2}) uses the exact threshold-path
/// solver. Other combinations are rejected.
inline SolveResult solve_tikhonov(const TikhonovProblem& prob, const SolverOptions& opt = {}) {
  if (!(prob.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (prob.p != 1 && prob.p != 2) throw std::invalid_argument("exponent p must be 1 or 2");
  if (prob.y_delta.size() != prob.op.data_dim())
    throw DimensionMismatch("y_delta", prob.op.data_dim(), prob.y_delta.size());
  if (prob.op.kind() == OperatorKind::lq_embedding && !(prob.p == 2 && prob.op.q() == 2.0))
    return detail::solve_embedding_path(prob);
  if (prob.p == 2 && prob.op.is_euclidean()) return detail::solve_fista(prob, opt);
  throw std::invalid_argument("solve_tikhonov: p=" + std::to_string(prob.p) + " with a " +
                              std::string(to_string(prob.op.y_norm())) +
                              " data norm is only supported for the l^q embedding");
}

enum class AlphaRuleKind { a_priori, discrepancy };

inline std::string_view to_string(AlphaRuleKind k) {
  return k == AlphaRuleKind::a_priori ? "a-priori" : "discrepancy";
}

inline AlphaRuleKind parse_alpha_rule(std::string_view s) {
  if (s == "a-priori" || s == "apriori") return AlphaRuleKind::a_priori;
  if (s == "discrepancy") return AlphaRuleKind::discrepancy;
  throw std::invalid_argument("unknown parameter choice rule '" + std::string(s) + "'");
}

struct AlphaRule {
  AlphaRuleKind kind = AlphaRuleKind::a_priori;
  double kappa = 1.0;       ///< a-priori: alpha = kappa delta
  double tau = 1.5;         ///< discrepancy: ||A x_alpha - y_delta|| <= tau delta
  double ratio = 0.8;       ///< discrepancy grid ratio
  double alpha_min = 1e-12; ///< floor; also the a-priori value for delta = 0
  Index max_steps = 400;
};

/// Parameter choice failed; [alpha_low, alpha_high] is the last bracket inspected.
class ParameterChoiceError : public std::runtime_error {
 public:
  ParameterChoiceError(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}
  double alpha_low() const noexcept { return lo_; }
  double alpha_high() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Start of the discrepancy grid: an alpha at which x = 0 is already optimal.
inline double zero_solution_alpha(const ForwardOperator& op, const DataVector& y, int p) {
  if (p == 1) return 1.0;
  return std::max(2.0 * op.adjoint(y).cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
}

inline double choose_alpha(const AlphaRule& rule, double delta, const ForwardOperator& op, const DataVector& y_delta,
                           int p = 2, const SolverOptions& opt = {}) {
  if (delta < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  if (rule.kind == AlphaRuleKind::a_priori) {
    if (delta == 0.0) return rule.alpha_min;
    return std::max(rule.kappa * delta, rule.alpha_min);
  }
  if (delta == 0.0) throw std::invalid_argument("discrepancy principle needs delta > 0");
  if (!(rule.ratio > 0.0 && rule.ratio < 1.0)) throw std::invalid_argument("grid ratio must lie in (0, 1)");
  double alpha = zero_solution_alpha(op, y_delta, p);
  double prev = alpha;
  for (Index step = 0; step < rule.max_steps && alpha >= rule.alpha_min; ++step) {
    const TikhonovProblem prob{op, y_delta, alpha, p};
    const SolveResult r = solve_tikhonov(prob, opt);
    if (op.norm(op.apply(r.x.coeffs) - y_delta) <= rule.tau * delta) return alpha;
    prev = alpha;
    alpha *= rule.ratio;
  }
  throw ParameterChoiceError("discrepancy principle: no grid alpha meets tau*delta", alpha, prev);
}

}  // namespace l1rates
