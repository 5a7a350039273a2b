#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace l1rates {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite section of an l1 sequence. Coefficients beyond the stored length are zero,
/// so the l1 norm is the plain sum of magnitudes.
///
/// Storage is always 0-based. `index_origin` is the sequence index of `coeffs[0]`:
/// 0 for N-indexed problems, negative for Z-indexed Fourier coefficients.
struct TruncatedSequence {
  Vector coeffs;
  long index_origin = 0;

  TruncatedSequence() = default;
  explicit TruncatedSequence(Vector c, long origin = 0) : coeffs(std::move(c)), index_origin(origin) {}

  static TruncatedSequence zeros(Index n, long origin = 0) {
    return TruncatedSequence(Vector::Zero(n), origin);
  }

  /// e^(k) at storage position `pos`.
  static TruncatedSequence unit(Index n, Index pos, long origin = 0) {
    if (pos < 0 || pos >= n) throw std::out_of_range("unit sequence position out of range");
    TruncatedSequence e = zeros(n, origin);
    e.coeffs[pos] = 1.0;
    return e;
  }

  Index size() const noexcept { return coeffs.size(); }
  double l1_norm() const { return coeffs.lpNorm<1>(); }

  /// Storage positions of nonzero coefficients, ascending.
  std::vector<Index> support() const {
    std::vector<Index> s;
    for (Index k = 0; k < coeffs.size(); ++k)
      if (coeffs[k] != 0.0) s.push_back(k);
    return s;
  }

  long sequence_index(Index pos) const noexcept { return index_origin + static_cast<long>(pos); }

  bool operator==(const TruncatedSequence& o) const {
    return index_origin == o.index_origin && coeffs.size() == o.coeffs.size() &&
           (coeffs.array() == o.coeffs.array()).all();
  }
};

/// A sign vector xi with entries in {-1, 0, +1}, stored sparsely.
class SignPattern {
 public:
  SignPattern() = default;

  /// `support` must be strictly increasing; `signs` must be +1/-1 and aligned with it.
  SignPattern(std::vector<Index> support, std::vector<int> signs)
      : support_(std::move(support)), signs_(std::move(signs)) {
    if (support_.size() != signs_.size())
      throw std::invalid_argument("sign pattern: support and signs differ in length");
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (support_[i] < 0) throw std::invalid_argument("sign pattern: negative index");
      if (i > 0 && support_[i] <= support_[i - 1])
        throw std::invalid_argument("sign pattern: support must be strictly increasing");
      if (signs_[i] != 1 && signs_[i] != -1)
        throw std::invalid_argument("sign pattern: signs must be +1 or -1");
    }
  }

  /// sgn x.
  static SignPattern of(const Vector& x) {
    std::vector<Index> s;
    std::vector<int> g;
    for (Index k = 0; k < x.size(); ++k) {
      if (x[k] > 0.0) {
        s.push_back(k);
        g.push_back(1);
      } else if (x[k] < 0.0) {
        s.push_back(k);
        g.push_back(-1);
      }
    }
    return SignPattern(std::move(s), std::move(g));
  }

  const std::vector<Index>& support() const noexcept { return support_; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  std::size_t size() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }

  /// Signs restricted to the support, as a dense vector of length |supp|.
  Vector compressed() const {
    Vector v(static_cast<Index>(signs_.size()));
    for (std::size_t i = 0; i < signs_.size(); ++i) v[static_cast<Index>(i)] = signs_[i];
    return v;
  }

  /// Dense sequence of length n.
  Vector dense(Index n) const {
    Vector v = Vector::Zero(n);
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (support_[i] >= n) throw std::out_of_range("sign pattern exceeds sequence length");
      v[support_[i]] = signs_[i];
    }
    return v;
  }

  /// Lexicographic order on (support, signs), with -1 before +1.
  friend bool operator<(const SignPattern& a, const SignPattern& b) {
    if (a.support_ != b.support_) return a.support_ < b.support_;
    return a.signs_ < b.signs_;
  }
  friend bool operator==(const SignPattern& a, const SignPattern& b) = default;

 private:
  std::vector<Index> support_;
  std::vector<int> signs_;
};

/// Families M_n of admissible index sets.
enum class IndexSetFamily {
  prefix,       ///< M_n = {{1..n}}
  all_subsets,  ///< M_n = {M : |M| = n}
};

inline std::string_view to_string(IndexSetFamily f) {
  return f == IndexSetFamily::prefix ? "prefix" : "all-subsets";
}

inline IndexSetFamily parse_family(std::string_view s) {
  if (s == "prefix") return IndexSetFamily::prefix;
  if (s == "all-subsets" || s == "all_subsets") return IndexSetFamily::all_subsets;
  throw std::invalid_argument("unknown index set family '" + std::string(s) + "'");
}

/// P_M x. Indices outside [0, x.size()) are ignored.
inline Vector project(std::span<const Index> m, const Vector& x) {
  Vector out = Vector::Zero(x.size());
  for (Index k : m)
    if (k >= 0 && k < x.size()) out[k] = x[k];
  return out;
}

inline TruncatedSequence project(std::span<const Index> m, const TruncatedSequence& x) {
  return TruncatedSequence(project(m, x.coeffs), x.index_origin);
}

/// (I - P_M) x.
inline Vector project_complement(std::span<const Index> m, const Vector& x) {
  Vector out = x;
  for (Index k : m)
    if (k >= 0 && k < x.size()) out[k] = 0.0;
  return out;
}

/// sum_{k > n} |x_k| in storage order.
inline double prefix_tail(const Vector& x, Index n) {
  if (n < 0) throw std::invalid_argument("prefix_tail: negative n");
  if (n >= x.size()) return 0.0;
  return x.tail(x.size() - n).lpNorm<1>();
}

/// sum_{k > n} |x_kappa(k)| with kappa a descending-magnitude reordering;
/// the minimum of ||(I - P_M) x||_1 over |M| = n.
inline double sorted_tail(const Vector& x, Index n) {
  if (n < 0) throw std::invalid_argument("sorted_tail: negative n");
  if (n > x.size()) throw std::invalid_argument("sorted_tail: n exceeds sequence length");
  std::vector<double> mag(static_cast<std::size_t>(x.size()));
  for (Index k = 0; k < x.size(); ++k) mag[static_cast<std::size_t>(k)] = std::abs(x[k]);
  std::sort(mag.begin(), mag.end(), std::greater<>());
  // Sum smallest-first to keep the tail accurate when it is tiny.
  double tail = 0.0;
  for (std::size_t i = mag.size(); i > static_cast<std::size_t>(n); --i) tail += mag[i - 1];
  return tail;
}

inline double prefix_tail(const TruncatedSequence& x, Index n) { return prefix_tail(x.coeffs, n); }
inline double sorted_tail(const TruncatedSequence& x, Index n) { return sorted_tail(x.coeffs, n); }

/// Tail for the given family: prefix_tail or sorted_tail.
inline double family_tail(const Vector& x, Index n, IndexSetFamily f) {
  return f == IndexSetFamily::prefix ? prefix_tail(x, n) : sorted_tail(x, n);
}

}  // namespace l1rates
