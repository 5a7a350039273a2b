#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace l1rates {

/// Operand sizes do not agree with an operator's domain or data space.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(const std::string& what, Eigen::Index expected, Eigen::Index got)
      : std::invalid_argument(what + ": expected dimension " + std::to_string(expected) +
                              ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}

  Eigen::Index expected() const noexcept { return expected_; }
  Eigen::Index got() const noexcept { return got_; }

 private:
  Eigen::Index expected_;
  Eigen::Index got_;
};

/// A dense operator failed the rank = N test at construction.
class NonInjectiveOperator : public std::runtime_error {
 public:
  NonInjectiveOperator(Eigen::Index rank, Eigen::Index cols)
      : std::runtime_error("operator is not injective: rank " + std::to_string(rank) + " < " +
                           std::to_string(cols) + " columns"),
        rank_(rank) {}

  Eigen::Index rank() const noexcept { return rank_; }

 private:
  Eigen::Index rank_;
};

/// The column restriction A_S is rank deficient, so no certificate exists on S.
class SingularSupport : public std::runtime_error {
 public:
  explicit SingularSupport(std::vector<Eigen::Index> support)
      : std::runtime_error("restricted operator is rank deficient on support " +
                           describe(support)),
        support_(std::move(support)) {}

  const std::vector<Eigen::Index>& support() const noexcept { return support_; }

 private:
  static std::string describe(const std::vector<Eigen::Index>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s[i]);
    }
    return out + "}";
  }

  std::vector<Eigen::Index> support_;
};

/// Enumeration would exceed the configured (M, xi) budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double required, double budget)
      : std::runtime_error("enumeration needs " + std::to_string(required) +
                           " sign patterns, budget is " + std::to_string(budget)),
        required_(required) {}

  double required() const noexcept { return required_; }

 private:
  double required_;
};

/// No available method certifies the source condition for the requested range.
class CertificationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace l1rates
