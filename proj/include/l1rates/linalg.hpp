#pragma once

#include "l1rates/sequence.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>

namespace l1rates::linalg {

struct PowerIteration {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of A^T A (the squared spectral norm of A) by power iteration.
inline PowerIteration largest_gram_eigenvalue(const Matrix& a, double tol = 1e-10,
                                              int max_iter = 10000) {
  PowerIteration out;
  const Index n = a.cols();
  if (n == 0 || a.rows() == 0) {
    out.converged = true;
    return out;
  }
  // Deterministic, generically non-orthogonal start.
  Vector v(n);
  for (Index k = 0; k < n; ++k) v[k] = 1.0 + 0.25 * std::sin(static_cast<double>(k) + 1.0);
  v.normalize();
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector av = a * v;
    const double rayleigh = av.squaredNorm();
    Vector w = a.transpose() * av;
    const double wn = w.norm();
    out.iterations = it;
    out.value = rayleigh;
    if (wn == 0.0) {
      out.converged = true;
      return out;
    }
    v = w / wn;
    if (it > 1 && std::abs(rayleigh - prev) <= tol * rayleigh) {
      out.value = std::max(rayleigh, (a * v).squaredNorm());
      out.converged = true;
      return out;
    }
    prev = rayleigh;
  }
  return out;
}

inline Matrix select_columns(const Matrix& a, std::span<const Index> cols) {
  Matrix out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = a.col(cols[i]);
  return out;
}

inline Vector select(const Vector& v, std::span<const Index> idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

/// Numerical rank with the column-pivoted QR default threshold.
inline Index rank(const Matrix& a) { return Eigen::ColPivHouseholderQR<Matrix>(a).rank(); }

}  // namespace l1rates::linalg
