// Certifies a small random operator and samples the variational inequality.

#include "l1rates/l1rates.hpp"

#include <iostream>
#include <random>

int main() {
  using namespace l1rates;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Matrix a(60, 6);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = normal(rng) / std::sqrt(60.0);
  const ForwardOperator op = ForwardOperator::dense(a);

  const GammaTable t = assemble_assumption(op, IndexSetFamily::all_subsets, 3, 0.95);
  std::cout << "method " << to_string(t.method) << ", c = " << t.c_used << "\n";
  for (const auto& e : t.entries) std::cout << "gamma_" << e.n << " = " << e.gamma << "\n";

  Vector xd = Vector::Zero(6);
  xd << 1.0, -0.5, 0.25, 0.0, 0.0, 0.0;
  const TruncatedSequence xdag(xd);
  const RateFunction phi = build_phi(xdag, t);
  ViSamplerConfig vc;
  vc.samples = 2000;
  const ViReport rep = check_vi(op, xdag, compute_beta(t.c_used), phi, vc);
  std::cout << "worst VI slack " << rep.worst_slack << (rep.holds() ? " (holds)" : " (violated)") << "\n";
  return rep.holds() ? 0 : 1;
}
