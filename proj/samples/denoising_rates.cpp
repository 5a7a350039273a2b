// Error against noise level for a power-decay x-dagger under the l^2 embedding.

#include "l1rates/l1rates.hpp"

#include <iostream>

int main() {
  using namespace l1rates;
  constexpr Index kDim = 200;
  ExperimentConfig cfg{ForwardOperator::lq_embedding(kDim, 2.0), TruncatedSequence::zeros(kDim)};
  for (Index k = 0; k < kDim; ++k) cfg.xdag.coeffs[k] = 1.0 / static_cast<double>((k + 1) * (k + 1));
  cfg.family = IndexSetFamily::prefix;
  cfg.seed = 1;

  const ExperimentResult r = run_rate_experiment(cfg);
  for (const auto& d : r.per_delta)
    std::cout << "delta " << d.delta << "  median error " << d.median_error << "  phi " << d.phi_of_delta
              << "  ratio " << d.ratio << "\n";
  std::cout << "fitted slope " << r.slope << "\n";
  return r.failed_cells == 0 ? 0 : 1;
}
