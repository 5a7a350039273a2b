#pragma once

#include "l1rates/circle_grid.hpp"
#include "l1rates/errors.hpp"
#include "l1rates/sequence.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace l1rates {

/// Samples of Ax. For the Wiener kinds the layout is [Re p(t_0..t_{G-1}), Im p(t_0..t_{G-1})].
using DataVector = Vector;

enum class OperatorKind { dense_matrix, lq_embedding, wiener_restriction, wiener_multiplication };

enum class YNorm { euclidean, lq, sup_grid };

inline std::string_view to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::dense_matrix: return "dense-matrix";
    case OperatorKind::lq_embedding: return "lq-embedding";
    case OperatorKind::wiener_restriction: return "wiener-restriction";
    case OperatorKind::wiener_multiplication: return "wiener-multiplication";
  }
  return "unknown";
}

inline std::string_view to_string(YNorm n) {
  switch (n) {
    case YNorm::euclidean: return "euclidean";
    case YNorm::lq: return "lq";
    case YNorm::sup_grid: return "sup-grid";
  }
  return "unknown";
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ||y||_q for q in [1, inf]. Scaled by the max modulus to avoid overflow for large q.
inline double lq_norm(const Vector& y, double q) {
  if (y.size() == 0) return 0.0;
  const double m = y.cwiseAbs().maxCoeff();
  if (std::isinf(q) || m == 0.0) return m;
  if (q == 1.0) return y.lpNorm<1>();
  if (q == 2.0) return y.norm();
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += std::pow(std::abs(y[i]) / m, q);
  return m * std::pow(s, 1.0 / q);
}

/// q' with 1/q + 1/q' = 1.
inline double conjugate_exponent(double q) {
  if (std::isinf(q)) return 1.0;
  if (q == 1.0) return kInfinity;
  return q / (q - 1.0);
}

/// Injective bounded linear map from the truncated coefficient space to a data space Y.
///
/// Every kind keeps a dense matrix whose k-th column is A e^(k); the Wiener kinds sample
/// p_x(t) = sum_k x_k e^{2 pi i m_k t} on an equispaced grid and store real and imaginary
/// parts as separate rows. Instances are immutable and share their state on copy.
///
/// Adjoint convention: for a dual vector eta of the data layout, A* eta = A^T eta with the
/// real pairing <eta, y> = sum_i eta_i y_i. For the sup-grid norm eta is a discrete measure
/// on the grid and its dual norm is sum_j |(eta_j, eta_{G+j})| over the grid points that
/// enter the norm.
class ForwardOperator {
 public:
  /// Dense matrix with a Euclidean or l^q data norm; throws NonInjectiveOperator unless
  /// rank A = number of columns.
  static ForwardOperator dense(Matrix a, YNorm norm = YNorm::euclidean, double q = 2.0) {
    ForwardOperator op = dense_any_rank(std::move(a), norm, q);
    if (op.rank() < op.domain_dim()) throw NonInjectiveOperator(op.rank(), op.domain_dim());
    return op;
  }

  /// Same as dense() but records the rank instead of rejecting rank-deficient matrices.
  static ForwardOperator dense_any_rank(Matrix a, YNorm norm = YNorm::euclidean, double q = 2.0) {
    if (norm == YNorm::sup_grid)
      throw std::invalid_argument("dense operators use a euclidean or lq data norm");
    if (a.cols() == 0) throw std::invalid_argument("dense operator needs at least one column");
    check_q(norm == YNorm::lq ? q : 2.0);
    auto s = std::make_shared<State>();
    s->kind = OperatorKind::dense_matrix;
    s->y_norm = norm;
    s->q = norm == YNorm::euclidean ? 2.0 : q;
    s->rank = Eigen::ColPivHouseholderQR<Matrix>(a).rank();
    s->matrix = std::move(a);
    return ForwardOperator(std::move(s));
  }

  /// Embedding l^1 -> l^q of the first n coefficients, 1 < q <= inf.
  static ForwardOperator lq_embedding(Index n, double q) {
    if (n < 1) throw std::invalid_argument("embedding dimension must be positive");
    check_q(q);
    auto s = std::make_shared<State>();
    s->kind = OperatorKind::lq_embedding;
    s->y_norm = YNorm::lq;
    s->q = q;
    s->rank = n;
    s->matrix = Matrix::Identity(n, n);
    return ForwardOperator(std::move(s));
  }

  /// A_E x = chi_E p_x sampled on `grid_size` points; frequencies freq_min..freq_max.
  static ForwardOperator wiener_restriction(std::vector<Interval> e, long grid_size, long freq_min,
                                            long freq_max) {
    auto s = wiener_state(std::move(e), grid_size, freq_min, freq_max);
    s->kind = OperatorKind::wiener_restriction;
    s->weight = Vector::Zero(grid_size);
    for (long j = 0; j < grid_size; ++j)
      if (s->mask[static_cast<std::size_t>(j)]) s->weight[j] = 1.0;
    fill_wiener_matrix(*s);
    return ForwardOperator(std::move(s));
  }

  /// A_g x = g p_x with g in (0, 1] and g >= chi_E, given by its grid samples.
  static ForwardOperator wiener_multiplication(std::vector<Interval> e, Vector weight_g,
                                               long grid_size, long freq_min, long freq_max) {
    auto s = wiener_state(std::move(e), grid_size, freq_min, freq_max);
    s->kind = OperatorKind::wiener_multiplication;
    if (weight_g.size() != grid_size) throw DimensionMismatch("weight_g", grid_size, weight_g.size());
    for (long j = 0; j < grid_size; ++j) {
      const double g = weight_g[j];
      if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("weight g must take values in (0, 1]");
      if (s->mask[static_cast<std::size_t>(j)] && g != 1.0)
        throw std::invalid_argument("weight g must equal 1 on E (g >= chi_E)");
    }
    s->weight = std::move(weight_g);
    std::fill(s->mask.begin(), s->mask.end(), 1);
    fill_wiener_matrix(*s);
    return ForwardOperator(std::move(s));
  }

  OperatorKind kind() const noexcept { return s_->kind; }
  YNorm y_norm() const noexcept { return s_->y_norm; }
  double q() const noexcept { return s_->q; }
  Index domain_dim() const noexcept { return s_->matrix.cols(); }
  Index data_dim() const noexcept { return s_->matrix.rows(); }
  Index rank() const noexcept { return s_->rank; }
  long index_origin() const noexcept { return s_->index_origin; }
  long grid_size() const noexcept { return s_->grid_size; }
  const std::vector<Interval>& intervals() const noexcept { return s_->intervals; }
  double measure_E() const noexcept { return measure(s_->intervals); }
  /// Fraction of grid points in E, the grid analogue of |E|.
  double grid_measure_E() const noexcept { return s_->grid_measure; }
  const Vector& weight() const noexcept { return s_->weight; }
  const Matrix& matrix() const noexcept { return s_->matrix; }

  bool is_wiener() const noexcept {
    return s_->kind == OperatorKind::wiener_restriction ||
           s_->kind == OperatorKind::wiener_multiplication;
  }

  /// True when the data norm is Hilbertian (euclidean, or l^2).
  bool is_euclidean() const noexcept {
    return s_->y_norm == YNorm::euclidean || (s_->y_norm == YNorm::lq && s_->q == 2.0);
  }

  DataVector apply(const Vector& x) const {
    if (x.size() != domain_dim()) throw DimensionMismatch("apply", domain_dim(), x.size());
    if (s_->kind == OperatorKind::lq_embedding) return x;
    return s_->matrix * x;
  }

  DataVector apply(const TruncatedSequence& x) const { return apply(x.coeffs); }

  /// A* eta under the real pairing of the data layout.
  Vector adjoint(const Vector& eta) const {
    if (eta.size() != data_dim()) throw DimensionMismatch("adjoint", data_dim(), eta.size());
    if (s_->kind == OperatorKind::lq_embedding) return eta;
    return s_->matrix.transpose() * eta;
  }

  /// ||y||_Y.
  double norm(const DataVector& y) const {
    if (y.size() != data_dim()) throw DimensionMismatch("y_norm", data_dim(), y.size());
    switch (s_->y_norm) {
      case YNorm::euclidean: return y.norm();
      case YNorm::lq: return lq_norm(y, s_->q);
      case YNorm::sup_grid: {
        const long g = s_->grid_size;
        double m = 0.0;
        for (long j = 0; j < g; ++j)
          if (s_->mask[static_cast<std::size_t>(j)]) m = std::max(m, std::hypot(y[j], y[g + j]));
        return m;
      }
    }
    return 0.0;
  }

  /// ||eta||_{Y*}.
  double dual_norm(const Vector& eta) const {
    if (eta.size() != data_dim()) throw DimensionMismatch("dual norm", data_dim(), eta.size());
    switch (s_->y_norm) {
      case YNorm::euclidean: return eta.norm();
      case YNorm::lq: return lq_norm(eta, conjugate_exponent(s_->q));
      case YNorm::sup_grid: {
        const long g = s_->grid_size;
        double m = 0.0;
        for (long j = 0; j < g; ++j)
          if (s_->mask[static_cast<std::size_t>(j)]) m += std::hypot(eta[j], eta[g + j]);
        return m;
      }
    }
    return 0.0;
  }

  /// ||A e^(k)||_Y.
  double column_norm(Index k) const { return norm(s_->matrix.col(k)); }

  double max_column_norm() const {
    double m = 0.0;
    for (Index k = 0; k < domain_dim(); ++k) m = std::max(m, column_norm(k));
    return m;
  }

  double min_column_norm() const {
    double m = kInfinity;
    for (Index k = 0; k < domain_dim(); ++k) m = std::min(m, column_norm(k));
    return m;
  }

  /// Same operator with every column multiplied by s > 0.
  ForwardOperator scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    auto s = std::make_shared<State>(*s_);
    s->matrix *= factor;
    if (s->kind == OperatorKind::lq_embedding) s->kind = OperatorKind::dense_matrix;
    s->weight *= factor;
    return ForwardOperator(std::move(s));
  }

 private:
  struct State {
    OperatorKind kind = OperatorKind::dense_matrix;
    YNorm y_norm = YNorm::euclidean;
    double q = 2.0;
    Matrix matrix;
    Index rank = 0;
    std::vector<Interval> intervals;
    long grid_size = 0;
    long index_origin = 0;
    double grid_measure = 0.0;
    Vector weight;
    std::vector<char> mask;
  };

  explicit ForwardOperator(std::shared_ptr<const State> s) : s_(std::move(s)) {}

  static void check_q(double q) {
    if (!(q > 1.0)) throw std::invalid_argument("data exponent q must lie in (1, inf]");
  }

  static std::shared_ptr<State> wiener_state(std::vector<Interval> e, long grid_size, long freq_min,
                                             long freq_max) {
    if (freq_max < freq_min) throw std::invalid_argument("empty frequency range");
    if (grid_size < 1) throw std::invalid_argument("grid size must be positive");
    auto s = std::make_shared<State>();
    s->intervals = normalize_intervals(std::move(e));
    s->y_norm = YNorm::sup_grid;
    s->q = kInfinity;
    s->grid_size = grid_size;
    s->index_origin = freq_min;
    s->rank = freq_max - freq_min + 1;
    s->mask = CircleGrid(grid_size).mask(s->intervals);
    long inside = 0;
    for (char c : s->mask) inside += c;
    if (inside == 0) throw std::invalid_argument("no grid point falls inside E; refine the grid");
    s->grid_measure = static_cast<double>(inside) / static_cast<double>(grid_size);
    s->matrix = Matrix::Zero(2 * grid_size, freq_max - freq_min + 1);
    return s;
  }

  static void fill_wiener_matrix(State& s) {
    const CircleGrid grid(s.grid_size);
    const long g = s.grid_size;
    for (Index k = 0; k < s.matrix.cols(); ++k) {
      const long freq = s.index_origin + static_cast<long>(k);
      for (long j = 0; j < g; ++j) {
        const double w = s.weight[j];
        if (w == 0.0) continue;
        const auto z = grid.phase(freq, j);
        s.matrix(j, k) = w * z.real();
        s.matrix(g + j, k) = w * z.imag();
      }
    }
  }

  std::shared_ptr<const State> s_;
};

}  // namespace l1rates
