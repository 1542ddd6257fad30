#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>

#include "bregaccel/model.hpp"
#include "bregaccel/portfolio.hpp"
#include "bregaccel/synth.hpp"

namespace testsupport {

using bregaccel::Index;
using bregaccel::Matrix;
using bregaccel::Vector;

// Small portfolio instance with a well-conditioned constraint matrix: covariance spectra
// in [0.1, 1] and per-period returns spread over [-0.1, 0.2] in shuffled order, so no two
// assets share a return and the budget rows are far from parallel.
inline bregaccel::PortfolioModel well_posed_portfolio(std::uint64_t seed, Index n_assets, Index periods) {
  bregaccel::SynthOptions o;
  o.seed = seed;
  o.n_assets = n_assets;
  o.periods = periods;
  o.eig_min = 0.1;
  o.eig_max = 1.0;
  o.return_sd = 0.0;
  const bregaccel::PortfolioModel base = bregaccel::synth_portfolio(o);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  std::uniform_real_distribution<double> tau(0.01, 0.1);
  std::vector<Vector> r;
  for (Index j = 0; j < periods; ++j) {
    std::vector<Index> order(static_cast<std::size_t>(n_assets));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Vector rj(n_assets);
    for (Index i = 0; i < n_assets; ++i) {
      const double slot = n_assets > 1 ? static_cast<double>(order[static_cast<std::size_t>(i)]) / (n_assets - 1) : 0.5;
      rj[i] = -0.1 + 0.3 * slot + jitter(rng);
    }
    r.push_back(rj);
  }
  const double xi_fin = bregaccel::naive_wealth(r, 1.0).xi_naive;
  const double t1 = tau(rng);
  const double t2 = tau(rng);
  return bregaccel::build_model(base.C_blocks, r, 1.0, xi_fin, t1, t2);
}

// Central differences of a scalar function.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                         double h = 1e-6) {
  Vector g(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testsupport
