#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1rates {

/// Half-open interval [lo, hi) on the circle T = [0, 1).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return t >= lo && t < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorts and validates a set E given as disjoint sub-intervals of [0, 1).
inline std::vector<Interval> normalize_intervals(std::vector<Interval> e) {
  if (e.empty()) throw std::invalid_argument("set E must contain at least one interval");
  std::sort(e.begin(), e.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i].lo >= 0.0 && e[i].hi <= 1.0 && e[i].lo < e[i].hi))
      throw std::invalid_argument("interval [" + std::to_string(e[i].lo) + ", " +
                                  std::to_string(e[i].hi) + ") is not a nonempty part of [0,1)");
    if (i > 0 && e[i].lo < e[i - 1].hi) throw std::invalid_argument("intervals of E overlap");
  }
  return e;
}

/// Lebesgue measure |E|.
inline double measure(const std::vector<Interval>& e) {
  double m = 0.0;
  for (const auto& i : e) m += i.length();
  return m;
}

/// Equispaced grid t_j = j / size on the circle with a table of e^{2 pi i j / size}.
/// Phases of integer frequencies are looked up through (freq * j mod size), so every
/// sample of e^{2 pi i m t_j} is exact up to the table rounding.
class CircleGrid {
 public:
  explicit CircleGrid(long size) : size_(size) {
    if (size < 1) throw std::invalid_argument("grid size must be positive");
    cos_.resize(static_cast<std::size_t>(size));
    sin_.resize(static_cast<std::size_t>(size));
    for (long j = 0; j < size; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(size);
      cos_[static_cast<std::size_t>(j)] = std::cos(angle);
      sin_[static_cast<std::size_t>(j)] = std::sin(angle);
    }
  }

  long size() const noexcept { return size_; }
  double point(long j) const noexcept { return static_cast<double>(j) / static_cast<double>(size_); }

  std::complex<double> phase(long freq, long j) const noexcept {
    const long r = ((freq % size_) * (j % size_)) % size_;
    const auto idx = static_cast<std::size_t>(r < 0 ? r + size_ : r);
    return {cos_[idx], sin_[idx]};
  }

  /// Indicator of grid points lying in E.
  std::vector<char> mask(const std::vector<Interval>& e) const {
    std::vector<char> m(static_cast<std::size_t>(size_), 0);
    for (long j = 0; j < size_; ++j) {
      const double t = point(j);
      for (const auto& i : e)
        if (i.contains(t)) {
          m[static_cast<std::size_t>(j)] = 1;
          break;
        }
    }
    return m;
  }

 private:
  long size_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace l1rates
