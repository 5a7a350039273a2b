#pragma once

#include "l1rates/certificates.hpp"
#include "l1rates/circle_grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1rates {

/// Grid too coarse for the requested frequencies.
class NyquistError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NazarovConfig {
  std::vector<Interval> e;
  Index n = 1;
  Index trials = 1000;
  long freq_min = -20;
  long freq_max = 20;
  long grid_size = 4096;
  std::uint64_t seed = 0;
};

struct NazarovReport {
  double measure_e = 0.0;
  double grid_measure_e = 0.0;
  Index n = 0;
  double bound = 0.0;       ///< (14/|E|)^{n-1}
  double sharp_bound = 0.0; ///< (16e/(pi |E|))^{n-1}
  Index trials = 0;
  Index violations = 0;
  double max_ratio = 0.0;   ///< largest ||x||_1 / sup_E |p|: empirical lower estimate of the constant
  double min_ratio = kInfinity;
  /// Largest |ratio - 1| seen; meaningful for n = 1 where the ratio is exactly 1.
  double max_unit_deviation = 0.0;
  /// Samples where the sup over the whole circle exceeded ||x||_1 (triangle inequality).
  Index upper_violations = 0;
};

/// Minimum grid size for frequencies up to |m|: 8 samples per period of the fastest mode.
inline long nyquist_grid_size(long freq_min, long freq_max) {
  return 8 * std::max(std::abs(freq_min), std::abs(freq_max));
}

/// Samples random n-term trigonometric polynomials with distinct integer frequencies and
/// complex Gaussian coefficients, and checks ||x||_1 <= (14/|E|)^{n-1} sup_{t in E} |p(t)|
/// with the supremum taken over the grid points inside E.
inline NazarovReport nazarov_check(const NazarovConfig& cfg) {
  const std::vector<Interval> e = normalize_intervals(cfg.e);
  if (cfg.n < 1) throw std::invalid_argument("n must be at least 1");
  if (cfg.freq_max < cfg.freq_min) throw std::invalid_argument("empty frequency range");
  const long span = cfg.freq_max - cfg.freq_min + 1;
  if (span < cfg.n) throw std::invalid_argument("frequency range holds fewer than n frequencies");
  if (cfg.grid_size < nyquist_grid_size(cfg.freq_min, cfg.freq_max))
    throw NyquistError("grid of " + std::to_string(cfg.grid_size) + " points is too coarse for |frequency| up to " +
                       std::to_string(std::max(std::abs(cfg.freq_min), std::abs(cfg.freq_max))) + "; need at least " +
                       std::to_string(nyquist_grid_size(cfg.freq_min, cfg.freq_max)));

  const CircleGrid grid(cfg.grid_size);
  const std::vector<char> mask = grid.mask(e);
  std::vector<long> inside;
  for (long j = 0; j < cfg.grid_size; ++j)
    if (mask[static_cast<std::size_t>(j)]) inside.push_back(j);
  if (inside.empty()) throw std::invalid_argument("no grid point falls inside E");

  NazarovReport rep;
  rep.measure_e = measure(e);
  rep.grid_measure_e = static_cast<double>(inside.size()) / static_cast<double>(cfg.grid_size);
  rep.n = cfg.n;
  rep.bound = nazarov_gamma(rep.measure_e, cfg.n);
  rep.sharp_bound = std::pow(16.0 * std::numbers::e / (std::numbers::pi * rep.measure_e), static_cast<double>(cfg.n - 1));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<long> pool(static_cast<std::size_t>(span));
  for (long i = 0; i < span; ++i) pool[static_cast<std::size_t>(i)] = cfg.freq_min + i;
  std::vector<long> freqs(static_cast<std::size_t>(cfg.n));
  std::vector<std::complex<double>> coef(static_cast<std::size_t>(cfg.n));

  for (Index trial = 0; trial < cfg.trials; ++trial) {
    for (Index i = 0; i < cfg.n; ++i) {
      std::uniform_int_distribution<long> pick(i, span - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
      freqs[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
      coef[static_cast<std::size_t>(i)] = {normal(rng), normal(rng)};
    }
    double l1 = 0.0;
    for (const auto& c : coef) l1 += std::abs(c);

    double sup_e = 0.0;
    double sup_all = 0.0;
    for (long j = 0; j < cfg.grid_size; ++j) {
      std::complex<double> v = 0.0;
      for (Index i = 0; i < cfg.n; ++i)
        v += coef[static_cast<std::size_t>(i)] * grid.phase(freqs[static_cast<std::size_t>(i)], j);
      const double a = std::abs(v);
      sup_all = std::max(sup_all, a);
      if (mask[static_cast<std::size_t>(j)]) sup_e = std::max(sup_e, a);
    }
    const double ratio = l1 / sup_e;
    ++rep.trials;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_unit_deviation = std::max(rep.max_unit_deviation, std::abs(ratio - 1.0));
    if (ratio > rep.bound) ++rep.violations;
    if (sup_all > l1 * (1.0 + 1e-12)) ++rep.upper_violations;
  }
  return rep;
}

}  // namespace l1rates
