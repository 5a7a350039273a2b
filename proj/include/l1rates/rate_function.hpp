#pragma once

#include "l1rates/certificates.hpp"
#include "l1rates/forward_operator.hpp"
#include "l1rates/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1rates {

/// beta = (1 - c) / (1 + c).
inline double compute_beta(double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("c must lie in [0, 1)");
  return (1.0 - c) / (1.0 + c);
}

/// phi(t) = 2 min_{1<=n<=n_max} (tail_n + gamma_n t / (1 + c)), stored as its lower envelope.
///
/// Each n contributes the affine function 2 tail_n + (2 gamma_n / (1 + c)) t. The envelope is
/// the sequence of pieces active on [breakpoint_i, breakpoint_{i+1}), with slopes strictly
/// decreasing left to right, so evaluation is a binary search.
class RateFunction {
 public:
  struct Point {
    Index n = 0;
    double tail = 0.0;
    double gamma = 0.0;
  };

  struct Piece {
    double t_start = 0.0;
    Index n = 0;
    double intercept = 0.0;
    double slope = 0.0;
  };

  RateFunction(std::vector<Point> points, double c, IndexSetFamily family)
      : points_(std::move(points)), c_(c), family_(family) {
    if (points_.empty()) throw std::invalid_argument("rate function needs at least one (tail, gamma) pair");
    if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("c must lie in [0, 1)");
    for (const auto& p : points_)
      if (!(p.gamma > 0.0) || !(p.tail >= 0.0)) throw std::invalid_argument("invalid (tail, gamma) pair");
    build_envelope();
  }

  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<Piece>& envelope() const noexcept { return pieces_; }
  double c() const noexcept { return c_; }
  IndexSetFamily family() const noexcept { return family_; }

  double operator()(double t) const {
    if (t < 0.0) throw std::domain_error("phi is defined on [0, inf)");
    const Piece& p = piece_at(t);
    return p.intercept + p.slope * t;
  }

  /// n attaining the minimum at t.
  Index active_n(double t) const { return piece_at(t).n; }

 private:
  const Piece& piece_at(double t) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double v, const Piece& p) { return v < p.t_start; });
    return *std::prev(it);
  }

  void build_envelope() {
    struct Line {
      Index n;
      double a;
      double b;
    };
    std::vector<Line> lines;
    for (const auto& p : points_) lines.push_back({p.n, 2.0 * p.tail, 2.0 * p.gamma / (1.0 + c_)});
    // Start: smallest intercept, ties to the smaller slope, then the smaller n.
    auto cur = std::min_element(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
      if (x.a != y.a) return x.a < y.a;
      if (x.b != y.b) return x.b < y.b;
      return x.n < y.n;
    });
    double t = 0.0;
    pieces_.push_back({0.0, cur->n, cur->a, cur->b});
    while (true) {
      // Next piece: among flatter lines, the one crossing the current line first.
      std::optional<std::size_t> next;
      double t_next = kInfinity;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (!(l.b < cur->b)) continue;
        const double cross = std::max(t, (l.a - cur->a) / (cur->b - l.b));
        if (cross < t_next || (cross == t_next && next && l.b < lines[*next].b)) {
          t_next = cross;
          next = i;
        }
      }
      if (!next || !std::isfinite(t_next)) break;
      cur = lines.begin() + static_cast<std::ptrdiff_t>(*next);
      t = t_next;
      if (pieces_.back().t_start == t)
        pieces_.back() = {t, cur->n, cur->a, cur->b};
      else
        pieces_.push_back({t, cur->n, cur->a, cur->b});
    }
  }

  std::vector<Point> points_;
  double c_;
  IndexSetFamily family_;
  std::vector<Piece> pieces_;
};

/// phi for x-dagger from a certified gamma table, with tails taken per the table's family.
inline RateFunction build_phi(const TruncatedSequence& xdag, const GammaTable& gammas) {
  if (gammas.entries.empty()) throw std::invalid_argument("build_phi: empty gamma table");
  if (gammas.n_max() > xdag.size())
    throw std::invalid_argument("build_phi: gamma table extends beyond the length of x-dagger");
  std::vector<RateFunction::Point> pts;
  for (const auto& e : gammas.entries)
    pts.push_back({e.n, family_tail(xdag.coeffs, e.n, gammas.family), e.gamma});
  return RateFunction(std::move(pts), gammas.c_used, gammas.family);
}

inline constexpr double kDefaultTolVi = 1e-9;

enum class ViSampleKind { identity, sign_flip, gaussian, truncation, scaling, sparse_random };

inline std::string_view to_string(ViSampleKind k) {
  switch (k) {
    case ViSampleKind::identity: return "identity";
    case ViSampleKind::sign_flip: return "sign-flip";
    case ViSampleKind::gaussian: return "gaussian";
    case ViSampleKind::truncation: return "truncation";
    case ViSampleKind::scaling: return "scaling";
    case ViSampleKind::sparse_random: return "sparse-random";
  }
  return "unknown";
}

struct ViSamplerConfig {
  Index samples = 10000;
  std::uint64_t seed = 0;
  double scale_min = 1e-6;  ///< perturbation scales, relative to ||x-dagger||_1
  double scale_max = 1e1;
  Index scale_count = 8;
  double tol_vi = kDefaultTolVi;
};

struct ViReport {
  double beta = 1.0;
  Index samples_tested = 0;
  double worst_slack = kInfinity;
  ViSampleKind worst_kind = ViSampleKind::identity;
  std::optional<TruncatedSequence> violating_x;
  std::uint64_t seed = 0;
  double tol_vi = kDefaultTolVi;

  bool holds() const noexcept { return worst_slack >= -tol_vi; }
};

/// ||x||_1 - ||x-dagger||_1 + phi(||Ax - Ax-dagger||_Y) - beta ||x - x-dagger||_1.
inline double vi_slack(const ForwardOperator& op, const Vector& xdag, const DataVector& axdag, double beta,
                       const RateFunction& phi, const Vector& x) {
  const double dist = op.norm(op.apply(x) - axdag);
  return x.lpNorm<1>() - xdag.lpNorm<1>() + phi(dist) - beta * (x - xdag).lpNorm<1>();
}

/// Samples the inequality beta ||x - x-dagger|| <= ||x|| - ||x-dagger|| + phi(||Ax - Ax-dagger||)
/// over sign flips of x-dagger, Gaussian perturbations at log-spaced scales, support
/// truncations P_M x-dagger, rescalings s x-dagger and random sparse vectors.
inline ViReport check_vi(const ForwardOperator& op, const TruncatedSequence& xdag, double beta,
                         const RateFunction& phi, const ViSamplerConfig& cfg = {}) {
  if (xdag.size() != op.domain_dim()) throw DimensionMismatch("check_vi x-dagger", op.domain_dim(), xdag.size());
  if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("beta must lie in (0, 1]");
  ViReport rep;
  rep.beta = beta;
  rep.seed = cfg.seed;
  rep.tol_vi = cfg.tol_vi;
  const Vector& xd = xdag.coeffs;
  const Index dim = xd.size();
  const DataVector axd = op.apply(xd);
  const double size = std::max(xd.lpNorm<1>(), 1.0 / static_cast<double>(dim));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::uniform_int_distribution<int> kind_pick(0, 4);
  std::uniform_int_distribution<Index> scale_pick(0, std::max<Index>(cfg.scale_count - 1, 0));
  std::uniform_int_distribution<Index> pos_pick(0, dim - 1);

  auto scale_of = [&](Index i) {
    if (cfg.scale_count <= 1) return cfg.scale_min * size;
    const double f = static_cast<double>(i) / static_cast<double>(cfg.scale_count - 1);
    return size * cfg.scale_min * std::pow(cfg.scale_max / cfg.scale_min, f);
  };

  auto record = [&](const Vector& x, ViSampleKind kind) {
    const double s = vi_slack(op, xd, axd, beta, phi, x);
    ++rep.samples_tested;
    if (s < rep.worst_slack) {
      rep.worst_slack = s;
      rep.worst_kind = kind;
      if (s < -cfg.tol_vi) rep.violating_x = TruncatedSequence(x, xdag.index_origin);
    }
  };

  record(xd, ViSampleKind::identity);
  for (Index i = 1; i < cfg.samples; ++i) {
    Vector x = xd;
    const int kind = kind_pick(rng);
    switch (kind) {
      case 0: {  // flip a few signs, optionally shrinking the flipped entries
        const Index flips = 1 + pos_pick(rng) % std::max<Index>(1, std::min<Index>(dim, 4));
        const double shrink = unit(rng);
        for (Index f = 0; f < flips; ++f) {
          const Index k = pos_pick(rng);
          x[k] = -shrink * x[k];
        }
        record(x, ViSampleKind::sign_flip);
        break;
      }
      case 1: {
        const double s = scale_of(scale_pick(rng));
        for (Index k = 0; k < dim; ++k) x[k] += s * normal(rng) / static_cast<double>(dim);
        record(x, ViSampleKind::gaussian);
        break;
      }
      case 2: {  // P_M x-dagger with a random M
        const double keep = unit(rng);
        for (Index k = 0; k < dim; ++k)
          if (unit(rng) > keep) x[k] = 0.0;
        record(x, ViSampleKind::truncation);
        break;
      }
      case 3: {
        const double s = 2.5 * unit(rng) - 0.5;
        record(s * xd, ViSampleKind::scaling);
        break;
      }
      default: {  // x-dagger plus a sparse spike
        const double s = scale_of(scale_pick(rng));
        const Index spikes = 1 + pos_pick(rng) % std::max<Index>(1, std::min<Index>(dim, 3));
        for (Index f = 0; f < spikes; ++f) x[pos_pick(rng)] += s * normal(rng);
        record(x, ViSampleKind::sparse_random);
        break;
      }
    }
  }
  return rep;
}

}  // namespace l1rates
