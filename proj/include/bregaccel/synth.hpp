#pragma once

#include <cstdint>

#include "bregaccel/portfolio.hpp"

namespace bregaccel {

/// Random fused-lasso portfolio instance. Covariance blocks are Q' diag(lambda) Q with a
/// log-uniform spectrum in [eig_min, eig_max] and Q a random orthogonal matrix; expected
/// returns are Gaussian. The target wealth equals the naive portfolio's final wealth.
struct SynthOptions {
  std::uint64_t seed = 42;
  Index n_assets = 3;
  Index periods = 2;
  double eig_min = 1e-4;
  double eig_max = 5e-2;
  double return_mean = 0.01;
  double return_sd = 0.005;
  double tau1 = 1e-2;
  double tau2 = 1e-2;
  double xi_ini = 1.0;
};

PortfolioModel synth_portfolio(const SynthOptions& opts);

}  // namespace bregaccel
