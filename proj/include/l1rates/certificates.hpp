#pragma once

#include "l1rates/errors.hpp"
#include "l1rates/forward_operator.hpp"
#include "l1rates/linalg.hpp"
#include "l1rates/sequence.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace l1rates {

/// Absolute tolerance for residuals that should vanish ("equality" conditions).
inline constexpr double kDefaultTolEq = 1e-8;
/// Default cap on the number of (M, xi) pairs an enumeration may visit.
inline constexpr double kDefaultEnumerationBudget = 1e6;

/// A source element eta for one sign pattern and its residuals against the
/// interpolation condition P_S A* eta = xi and the off-support bound.
struct CertificateReport {
  SignPattern xi;
  Vector eta;
  double eta_norm = 0.0;
  double on_support_residual = 0.0;
  double off_support_sup = 0.0;
  double c_target = 0.0;
  double tol_eq = kDefaultTolEq;
  bool passed = false;
};

namespace detail {

inline void check_c_target(double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("c_target must lie in [0, 1)");
}

inline void require_euclidean(const ForwardOperator& op, std::string_view what) {
  if (!op.is_euclidean())
    throw std::invalid_argument(std::string(what) + " requires a euclidean data norm, got " +
                                std::string(to_string(op.y_norm())));
}

inline void check_support(const ForwardOperator& op, const SignPattern& xi) {
  for (Index k : xi.support())
    if (k >= op.domain_dim()) throw DimensionMismatch("sign pattern support", op.domain_dim(), k + 1);
}

inline CertificateReport finish_report(const ForwardOperator& op, const SignPattern& xi, Vector eta,
                                       double c_target, double tol_eq) {
  CertificateReport r;
  const Vector image = op.adjoint(eta);
  const Vector target = xi.dense(op.domain_dim());
  std::vector<char> on(static_cast<std::size_t>(op.domain_dim()), 0);
  for (Index k : xi.support()) on[static_cast<std::size_t>(k)] = 1;
  for (Index k = 0; k < image.size(); ++k) {
    if (on[static_cast<std::size_t>(k)])
      r.on_support_residual = std::max(r.on_support_residual, std::abs(image[k] - target[k]));
    else
      r.off_support_sup = std::max(r.off_support_sup, std::abs(image[k]));
  }
  r.xi = xi;
  r.eta_norm = op.dual_norm(eta);
  r.eta = std::move(eta);
  r.c_target = c_target;
  r.tol_eq = tol_eq;
  r.passed = r.on_support_residual <= tol_eq && r.off_support_sup <= c_target;
  return r;
}

}  // namespace detail

/// Minimum-norm eta with P_S A* eta = xi on S = supp xi, i.e. eta = A_S (A_S^T A_S)^{-1} xi_S.
/// Throws SingularSupport when A_S has deficient column rank.
inline CertificateReport find_certificate(const ForwardOperator& op, const SignPattern& xi,
                                          double c_target, double tol_eq = kDefaultTolEq) {
  detail::require_euclidean(op, "find_certificate");
  detail::check_c_target(c_target);
  detail::check_support(op, xi);
  if (xi.empty()) return detail::finish_report(op, xi, Vector::Zero(op.data_dim()), c_target, tol_eq);
  const Matrix as = linalg::select_columns(op.matrix(), xi.support());
  if (linalg::rank(as) < as.cols()) throw SingularSupport(xi.support());
  const Matrix gram = as.transpose() * as;
  const Vector w = gram.ldlt().solve(xi.compressed());
  return detail::finish_report(op, xi, as * w, c_target, tol_eq);
}

/// Minimum-norm eta with A* eta = xi on the whole index range (xi zero off its support).
/// Succeeds with off_support_sup ~ 0 exactly when xi lies in the range of A*.
inline CertificateReport find_range_certificate(const ForwardOperator& op, const SignPattern& xi,
                                                double c_target, double tol_eq = kDefaultTolEq) {
  detail::require_euclidean(op, "find_range_certificate");
  detail::check_c_target(c_target);
  detail::check_support(op, xi);
  const Matrix at = op.matrix().transpose();
  const Vector eta = Eigen::CompleteOrthogonalDecomposition<Matrix>(at).solve(xi.dense(op.domain_dim()));
  return detail::finish_report(op, xi, eta, c_target, tol_eq);
}

/// gamma_n, or the explicit "infinite" outcome when restricted injectivity fails.
class GammaValue {
 public:
  static GammaValue finite(double v) { return GammaValue(v, {}); }
  static GammaValue infinite(std::vector<Index> singular_support) {
    return GammaValue(0.0, std::move(singular_support));
  }

  bool is_finite() const noexcept { return !singular_.has_value(); }
  bool is_infinite() const noexcept { return singular_.has_value(); }

  double value() const {
    if (singular_) throw SingularSupport(*singular_);
    return value_;
  }

  /// Lexicographically first support on which A_M is rank deficient.
  const std::vector<Index>& singular_support() const {
    static const std::vector<Index> none;
    return singular_ ? *singular_ : none;
  }

 private:
  GammaValue(double v, std::optional<std::vector<Index>> s) : value_(v), singular_(std::move(s)) {}
  double value_ = 0.0;
  std::optional<std::vector<Index>> singular_;
};

enum class GammaMethod { analytic, brute_force, smooth_basis, nonsmooth_basis };

inline std::string_view to_string(GammaMethod m) {
  switch (m) {
    case GammaMethod::analytic: return "analytic";
    case GammaMethod::brute_force: return "brute-force";
    case GammaMethod::smooth_basis: return "smooth-basis";
    case GammaMethod::nonsmooth_basis: return "nonsmooth-basis";
  }
  return "unknown";
}

inline GammaMethod parse_gamma_method(std::string_view s) {
  if (s == "analytic") return GammaMethod::analytic;
  if (s == "brute-force") return GammaMethod::brute_force;
  if (s == "smooth-basis") return GammaMethod::smooth_basis;
  if (s == "nonsmooth-basis") return GammaMethod::nonsmooth_basis;
  throw std::invalid_argument("unknown gamma method '" + std::string(s) + "'");
}

struct GammaEntry {
  Index n = 0;  ///< sparsity level, 1-based
  double gamma = 0.0;
  GammaMethod method = GammaMethod::analytic;
};

/// The constants gamma_1..gamma_nmax together with the off-support constant c they were
/// certified with.
struct GammaTable {
  IndexSetFamily family = IndexSetFamily::prefix;
  std::vector<GammaEntry> entries;
  double c_used = 0.0;
  GammaMethod method = GammaMethod::analytic;

  Index n_max() const noexcept { return static_cast<Index>(entries.size()); }

  double gamma(Index n) const {
    if (n < 1 || n > n_max()) throw std::out_of_range("gamma table has no entry for n=" + std::to_string(n));
    return entries[static_cast<std::size_t>(n - 1)].gamma;
  }
};

/// Closed-form gamma_n = n^{1-1/q} of the l^1 -> l^q embedding (n for q = inf).
inline double embedding_gamma(double q, Index n) {
  if (std::isinf(q)) return static_cast<double>(n);
  return std::pow(static_cast<double>(n), 1.0 - 1.0 / q);
}

/// Turan-Nazarov constant (14/|E|)^{n-1}.
inline double nazarov_gamma(double measure_e, Index n) {
  return std::pow(14.0 / measure_e, static_cast<double>(n - 1));
}

namespace detail {

/// Exact minimum dual-norm certificates on one support M, for every sign vector on M.
/// Euclidean data: eta = A_M G^{-1} xi with G = A_M^T A_M, ||eta||^2 = xi^T G^{-1} xi.
/// l^q embedding: A* is the coordinate identity, so eta = xi extended by zero and
/// ||eta|| = ||xi||_{q'}.
class SupportDuals {
 public:
  SupportDuals(const ForwardOperator& op, std::vector<Index> m) : op_(&op), m_(std::move(m)) {
    if (op.kind() == OperatorKind::lq_embedding) {
      embedding_ = true;
      return;
    }
    require_euclidean(op, "exact support certificates");
    const Matrix am = linalg::select_columns(op.matrix(), m_);
    if (linalg::rank(am) < am.cols()) throw SingularSupport(m_);
    llt_.compute(am.transpose() * am);
    cross_ = op.matrix().transpose() * am;
  }

  const std::vector<Index>& support() const noexcept { return m_; }

  double eta_norm(const Vector& xi_m) const {
    if (embedding_) return lq_norm(xi_m, conjugate_exponent(op_->q()));
    return std::sqrt(std::max(0.0, xi_m.dot(llt_.solve(xi_m))));
  }

  double off_support_sup(const Vector& xi_m) const {
    if (embedding_) return 0.0;
    const Vector image = cross_ * llt_.solve(xi_m);
    std::vector<char> on(static_cast<std::size_t>(image.size()), 0);
    for (Index k : m_) on[static_cast<std::size_t>(k)] = 1;
    double s = 0.0;
    for (Index k = 0; k < image.size(); ++k)
      if (!on[static_cast<std::size_t>(k)]) s = std::max(s, std::abs(image[k]));
    return s;
  }

 private:
  const ForwardOperator* op_;
  std::vector<Index> m_;
  bool embedding_ = false;
  Eigen::LLT<Matrix> llt_;
  Matrix cross_;
};

inline double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Calls f(support) for every k-subset of {0..n-1} in lexicographic order; stops when f
/// returns false.
template <class F>
void for_each_combination(Index n, Index k, F&& f) {
  if (k < 0 || k > n) return;
  std::vector<Index> c(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!f(static_cast<const std::vector<Index>&>(c))) return;
    Index i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// Sign vectors on k positions in lexicographic order (-1 before +1).
inline Vector sign_vector(Index k, std::uint64_t code) {
  Vector s(k);
  for (Index i = 0; i < k; ++i) s[i] = ((code >> (k - 1 - i)) & 1U) ? 1.0 : -1.0;
  return s;
}

inline std::vector<int> to_signs(const Vector& s) {
  std::vector<int> g(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i) g[static_cast<std::size_t>(i)] = s[i] > 0 ? 1 : -1;
  return g;
}

inline void check_level(const ForwardOperator& op, Index n) {
  if (n < 1 || n > op.domain_dim())
    throw std::invalid_argument("sparsity level n=" + std::to_string(n) + " outside [1, " +
                                std::to_string(op.domain_dim()) + "]");
  if (n > 62) throw std::invalid_argument("sparsity level too large for sign enumeration");
}

}  // namespace detail

struct BruteForceGamma {
  GammaValue gamma = GammaValue::finite(0.0);
  SignPattern argmax;  ///< lexicographically smallest maximizing (M, xi)
  std::size_t patterns = 0;
};

/// gamma_n as the largest minimum-norm certificate over M in M_n and xi with supp xi = M.
/// Equals the best constant in ||x||_1 <= gamma_n ||Ax|| for x supported in a member of M_n.
/// Supports euclidean data norms and the l^q embedding.
inline BruteForceGamma brute_force_gamma(const ForwardOperator& op, Index n, IndexSetFamily family,
                                         double budget = kDefaultEnumerationBudget) {
  detail::check_level(op, n);
  const Index dim = op.domain_dim();
  const double supports = family == IndexSetFamily::prefix ? 1.0 : detail::binomial(dim, n);
  const double required = supports * std::ldexp(1.0, static_cast<int>(n));
  if (required > budget) throw BudgetExceeded(required, budget);

  BruteForceGamma out;
  double best = -1.0;
  double best_arg = -1.0;
  auto visit = [&](const std::vector<Index>& m) {
    std::optional<detail::SupportDuals> duals;
    try {
      duals.emplace(op, m);
    } catch (const SingularSupport&) {
      out.gamma = GammaValue::infinite(m);
      return false;
    }
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < count; ++code) {
      const Vector xi = detail::sign_vector(n, code);
      const double v = duals->eta_norm(xi);
      ++out.patterns;
      best = std::max(best, v);
      if (v > best_arg * (1.0 + 1e-12)) {
        best_arg = v;
        out.argmax = SignPattern(m, detail::to_signs(xi));
      }
    }
    return true;
  };
  if (family == IndexSetFamily::prefix) {
    std::vector<Index> m(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
    visit(m);
  } else {
    detail::for_each_combination(dim, n, visit);
  }
  if (out.gamma.is_finite()) out.gamma = GammaValue::finite(best);
  return out;
}

/// Best restricted-injectivity constant max ||x||_1 / ||Ax||_2 over x supported in a member
/// of M_n, evaluated per support through the Householder QR A_M = QR:
/// max_x ||x||_1/||R x||_2 = max_xi ||R^{-T} xi||_2.
inline GammaValue injectivity_gamma_exhaustive(const ForwardOperator& op, Index n,
                                               IndexSetFamily family = IndexSetFamily::all_subsets,
                                               double budget = kDefaultEnumerationBudget) {
  detail::require_euclidean(op, "injectivity_gamma_exhaustive");
  detail::check_level(op, n);
  const double supports = family == IndexSetFamily::prefix ? 1.0 : detail::binomial(op.domain_dim(), n);
  if (supports * std::ldexp(1.0, static_cast<int>(n)) > budget)
    throw BudgetExceeded(supports * std::ldexp(1.0, static_cast<int>(n)), budget);

  std::optional<GammaValue> singular;
  double best = 0.0;
  auto visit = [&](const std::vector<Index>& m) {
    const Matrix am = linalg::select_columns(op.matrix(), m);
    Eigen::HouseholderQR<Matrix> qr(am);
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const double scale = r.diagonal().cwiseAbs().maxCoeff();
    if (r.diagonal().cwiseAbs().minCoeff() <= scale * 1e-13 * static_cast<double>(am.rows())) {
      singular = GammaValue::infinite(m);
      return false;
    }
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < count; ++code) {
      const Vector z = r.transpose().triangularView<Eigen::Lower>().solve(detail::sign_vector(n, code));
      best = std::max(best, z.norm());
    }
    return true;
  };
  if (family == IndexSetFamily::prefix) {
    std::vector<Index> m(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
    visit(m);
  } else {
    detail::for_each_combination(op.domain_dim(), n, visit);
  }
  if (singular) return *singular;
  return GammaValue::finite(best);
}

struct OffSupportBound {
  double c = 0.0;
  SignPattern argmax;
  std::size_t patterns = 0;
};

/// Largest ||(I - P_supp xi) A* eta||_inf of the minimum-norm certificates over every xi
/// admissible for some n <= n_max: all supports of size <= n_max (all-subsets), or all
/// nonempty subsets of {1..n_max} (prefix). This is the c in condition (iii) for the
/// brute-force certificates.
inline OffSupportBound off_support_bound(const ForwardOperator& op, Index n_max, IndexSetFamily family,
                                         double budget = kDefaultEnumerationBudget) {
  detail::check_level(op, n_max);
  const Index dim = op.domain_dim();
  double required = 0.0;
  for (Index s = 1; s <= n_max; ++s)
    required += detail::binomial(family == IndexSetFamily::prefix ? n_max : dim, s) *
                std::ldexp(1.0, static_cast<int>(s));
  if (required > budget) throw BudgetExceeded(required, budget);

  OffSupportBound out;
  const Index pool = family == IndexSetFamily::prefix ? n_max : dim;
  for (Index s = 1; s <= n_max; ++s) {
    detail::for_each_combination(pool, s, [&](const std::vector<Index>& m) {
      const detail::SupportDuals duals(op, m);
      const std::uint64_t count = std::uint64_t{1} << s;
      for (std::uint64_t code = 0; code < count; ++code) {
        const Vector xi = detail::sign_vector(s, code);
        const double v = duals.off_support_sup(xi);
        ++out.patterns;
        if (v > out.c * (1.0 + 1e-12) || out.patterns == 1) {
          out.c = std::max(out.c, v);
          out.argmax = SignPattern(m, detail::to_signs(xi));
        }
      }
      return true;
    });
  }
  return out;
}

struct InjectivityReport {
  Index samples = 0;
  Index violations = 0;
  double bound = 0.0;        ///< 1 / gamma
  double worst_ratio = kInfinity;  ///< min ||Ax||_Y / ||x||_1 over the samples
  Vector worst_x;
  std::optional<Vector> first_violation;
};

/// Samples x with |supp x| <= n and checks ||Ax||_Y >= ||x||_1 / gamma for any data norm.
/// Half of the samples carry equal-magnitude entries, the extremal shape for l^q norms.
inline InjectivityReport check_restricted_injectivity(const ForwardOperator& op, Index n, double gamma,
                                                      Index samples, std::uint64_t seed = 0) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  detail::check_level(op, n);
  InjectivityReport rep;
  rep.bound = 1.0 / gamma;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<Index> level(1, n);
  std::bernoulli_distribution coin;
  const Index dim = op.domain_dim();
  std::vector<Index> pool(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Index s = 0; s < samples; ++s) {
    const Index k = level(rng);
    for (Index i = 0; i < k; ++i) {
      std::uniform_int_distribution<Index> pick(i, dim - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    const bool flat = coin(rng);
    Vector x = Vector::Zero(dim);
    for (Index i = 0; i < k; ++i) {
      const double v = normal(rng);
      x[pool[static_cast<std::size_t>(i)]] = flat ? (v >= 0 ? 1.0 : -1.0) : v;
    }
    const double l1 = x.lpNorm<1>();
    if (l1 == 0.0) continue;
    const double ratio = op.norm(op.apply(x)) / l1;
    ++rep.samples;
    if (ratio < rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_x = x;
    }
    if (ratio < rep.bound * (1.0 - 1e-12)) {
      ++rep.violations;
      if (!rep.first_violation) rep.first_violation = x;
    }
  }
  return rep;
}

struct SmoothBasisResult {
  bool ok = false;
  std::optional<Index> failing_position;  ///< storage position k of the first unsolvable e^(k)
  std::vector<Vector> f;                  ///< f^(k) for the solved positions
  std::vector<double> f_norms;
  std::vector<double> residuals;
  GammaTable table;  ///< prefix family, c = 0, gamma_n = sum_{k<=n} ||f^(k)||; filled when ok
};

/// Range conditions e^(k) = A* f^(k) for k = 1..k_max, solved in the least-squares sense.
inline SmoothBasisResult smooth_basis_check(const ForwardOperator& op, Index k_max,
                                            double tol_eq = kDefaultTolEq) {
  detail::require_euclidean(op, "smooth_basis_check");
  if (k_max < 1 || k_max > op.domain_dim()) throw std::invalid_argument("k_max outside [1, N]");
  SmoothBasisResult out;
  const Matrix at = op.matrix().transpose();
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(at);
  double running = 0.0;
  for (Index k = 0; k < k_max; ++k) {
    const Vector e = Vector::Unit(op.domain_dim(), k);
    Vector f = cod.solve(e);
    const double res = (at * f - e).norm();
    out.residuals.push_back(res);
    if (!(res <= tol_eq)) {
      out.failing_position = k;
      return out;
    }
    const double fn = op.dual_norm(f);
    running += fn;
    out.f_norms.push_back(fn);
    out.f.push_back(std::move(f));
    out.table.entries.push_back({k + 1, running, GammaMethod::smooth_basis});
  }
  out.ok = true;
  out.table.family = IndexSetFamily::prefix;
  out.table.c_used = 0.0;
  out.table.method = GammaMethod::smooth_basis;
  return out;
}

struct NonsmoothBasisResult {
  bool ok = false;
  Index n = 0;
  std::optional<Index> failing_position;  ///< k whose interpolation system is unsolvable
  std::string reason;
  double gamma = 0.0;  ///< sum_k ||f^(n,k)||
  double c_est = 0.0;  ///< sup_{l>n} sum_k |[A* f^(n,k)]_l|
  std::vector<Vector> f;
  Matrix images;  ///< column k is A* f^(n,k)
};

/// Minimum-norm f^(n,k) with [A* f]_l = delta_kl for l <= n, and the resulting constants.
inline NonsmoothBasisResult nonsmooth_basis_check(const ForwardOperator& op, Index n,
                                                  double tol_eq = kDefaultTolEq) {
  detail::require_euclidean(op, "nonsmooth_basis_check");
  if (n < 1 || n > op.domain_dim()) throw std::invalid_argument("n outside [1, N]");
  NonsmoothBasisResult out;
  out.n = n;
  const Matrix head_t = op.matrix().leftCols(n).transpose();
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(head_t);
  out.images.resize(op.domain_dim(), n);
  for (Index k = 0; k < n; ++k) {
    const Vector e = Vector::Unit(n, k);
    Vector f = cod.solve(e);
    const double res = (head_t * f - e).cwiseAbs().maxCoeff();
    if (!(res <= tol_eq)) {
      out.failing_position = k;
      out.reason = "interpolation system for k=" + std::to_string(k + 1) + " is not solvable";
      return out;
    }
    out.gamma += op.dual_norm(f);
    out.images.col(k) = op.adjoint(f);
    out.f.push_back(std::move(f));
  }
  for (Index l = n; l < op.domain_dim(); ++l)
    out.c_est = std::max(out.c_est, out.images.row(l).cwiseAbs().sum());
  out.ok = out.c_est < 1.0;
  if (!out.ok) out.reason = "off-block column sums reach " + std::to_string(out.c_est) + " >= 1";
  return out;
}

struct AssembleOptions {
  std::optional<GammaMethod> method;  ///< force one method instead of choosing
  double budget = kDefaultEnumerationBudget;
  double tol_eq = kDefaultTolEq;
};

namespace detail {

inline GammaTable analytic_embedding_table(const ForwardOperator& op, IndexSetFamily family, Index n_max) {
  GammaTable t;
  t.family = family;
  t.c_used = 0.0;
  t.method = GammaMethod::analytic;
  for (Index n = 1; n <= n_max; ++n) t.entries.push_back({n, embedding_gamma(op.q(), n), GammaMethod::analytic});
  return t;
}

inline std::optional<GammaTable> try_smooth(const ForwardOperator& op, IndexSetFamily family, Index n_max,
                                            const AssembleOptions& opt, std::string& why) {
  // A full-range smooth check is needed for all-subsets (any k can be in M).
  const Index k_max = family == IndexSetFamily::prefix ? n_max : op.domain_dim();
  SmoothBasisResult r = smooth_basis_check(op, k_max, opt.tol_eq);
  if (!r.ok) {
    why += "smooth-basis: e^(" + std::to_string(*r.failing_position + 1) + ") not in range of A*; ";
    return std::nullopt;
  }
  if (family == IndexSetFamily::prefix) return r.table;
  // eta = sum_{k in M} xi_k f^(k): bound by the n largest ||f^(k)||.
  std::vector<double> norms = r.f_norms;
  std::sort(norms.begin(), norms.end(), std::greater<>());
  GammaTable t;
  t.family = family;
  t.c_used = 0.0;
  t.method = GammaMethod::smooth_basis;
  double running = 0.0;
  for (Index n = 1; n <= n_max; ++n) {
    running += norms[static_cast<std::size_t>(n - 1)];
    t.entries.push_back({n, running, GammaMethod::smooth_basis});
  }
  return t;
}

inline std::optional<GammaTable> try_nonsmooth(const ForwardOperator& op, IndexSetFamily family, Index n_max,
                                               double c_target, const AssembleOptions& opt, std::string& why) {
  if (family != IndexSetFamily::prefix) {
    why += "nonsmooth-basis: only certifies the prefix family; ";
    return std::nullopt;
  }
  GammaTable t;
  t.family = family;
  t.method = GammaMethod::nonsmooth_basis;
  for (Index n = 1; n <= n_max; ++n) {
    NonsmoothBasisResult r = nonsmooth_basis_check(op, n, opt.tol_eq);
    if (!r.ok) {
      why += "nonsmooth-basis n=" + std::to_string(n) + ": " + r.reason + "; ";
      return std::nullopt;
    }
    t.c_used = std::max(t.c_used, r.c_est);
    t.entries.push_back({n, r.gamma, GammaMethod::nonsmooth_basis});
  }
  if (t.c_used > c_target) {
    why += "nonsmooth-basis: c=" + std::to_string(t.c_used) + " exceeds target; ";
    return std::nullopt;
  }
  return t;
}

inline std::optional<GammaTable> try_brute_force(const ForwardOperator& op, IndexSetFamily family, Index n_max,
                                                 double c_target, const AssembleOptions& opt, std::string& why) {
  GammaTable t;
  t.family = family;
  t.method = GammaMethod::brute_force;
  try {
    const OffSupportBound c = off_support_bound(op, n_max, family, opt.budget);
    if (c.c > c_target) {
      why += "brute-force: off-support bound " + std::to_string(c.c) + " exceeds target; ";
      return std::nullopt;
    }
    t.c_used = c.c;
    for (Index n = 1; n <= n_max; ++n) {
      const BruteForceGamma g = brute_force_gamma(op, n, family, opt.budget);
      if (g.gamma.is_infinite()) {
        why += "brute-force: restricted injectivity fails at n=" + std::to_string(n) + "; ";
        return std::nullopt;
      }
      t.entries.push_back({n, g.gamma.value(), GammaMethod::brute_force});
    }
  } catch (const BudgetExceeded& e) {
    why += std::string("brute-force: ") + e.what() + "; ";
    return std::nullopt;
  } catch (const SingularSupport& e) {
    why += std::string("brute-force: ") + e.what() + "; ";
    return std::nullopt;
  }
  return t;
}

}  // namespace detail

/// Certifies the source condition for n = 1..n_max with off-support constant <= c_target and
/// returns the gamma table. Method order: analytic for the l^q embedding; for euclidean
/// dense operators smooth-basis, nonsmooth-basis, brute-force on the prefix family and
/// brute-force, smooth-basis on the all-subsets family. Throws CertificationError when
/// nothing applies.
inline GammaTable assemble_assumption(const ForwardOperator& op, IndexSetFamily family, Index n_max,
                                      double c_target, const AssembleOptions& opt = {}) {
  detail::check_c_target(c_target);
  if (n_max < 1 || n_max > op.domain_dim()) throw std::invalid_argument("n_max outside [1, N]");
  if (op.is_wiener())
    throw CertificationError(
        "Wiener operators only carry the restricted injectivity constants (14/|E|)^{n-1}; "
        "no off-support certificate is available");

  std::string why;
  auto run = [&](GammaMethod m) -> std::optional<GammaTable> {
    switch (m) {
      case GammaMethod::analytic:
        if (op.kind() != OperatorKind::lq_embedding) {
          why += "analytic: only known for the l^q embedding; ";
          return std::nullopt;
        }
        return detail::analytic_embedding_table(op, family, n_max);
      case GammaMethod::smooth_basis:
        if (!op.is_euclidean()) break;
        return detail::try_smooth(op, family, n_max, opt, why);
      case GammaMethod::nonsmooth_basis:
        if (!op.is_euclidean()) break;
        return detail::try_nonsmooth(op, family, n_max, c_target, opt, why);
      case GammaMethod::brute_force:
        if (!op.is_euclidean() && op.kind() != OperatorKind::lq_embedding) break;
        return detail::try_brute_force(op, family, n_max, c_target, opt, why);
    }
    why += std::string(to_string(m)) + ": needs a euclidean data norm; ";
    return std::nullopt;
  };

  std::vector<GammaMethod> order;
  if (opt.method) {
    order = {*opt.method};
  } else if (op.kind() == OperatorKind::lq_embedding) {
    order = {GammaMethod::analytic};
  } else if (family == IndexSetFamily::prefix) {
    order = {GammaMethod::smooth_basis, GammaMethod::nonsmooth_basis, GammaMethod::brute_force};
  } else {
    order = {GammaMethod::brute_force, GammaMethod::smooth_basis};
  }
  for (GammaMethod m : order)
    if (auto t = run(m)) return *t;
  throw CertificationError("no method certifies the source condition up to n=" + std::to_string(n_max) +
                           ": " + why);
}

}  // namespace l1rates
