#include "bregaccel/synth.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "bregaccel/error.hpp"

namespace bregaccel {

namespace {

// Distributions are written out over the raw engine output so that files generated from
// a seed are identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double out = *spare_;
      spare_.reset();
      return out;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace

PortfolioModel synth_portfolio(const SynthOptions& opts) {
  if (opts.n_assets < 1 || opts.periods < 1) throw InvalidProblemError("n_assets and periods must be positive");
  if (!(opts.eig_min > 0.0) || !(opts.eig_max >= opts.eig_min))
    throw InvalidProblemError("spectrum bounds must satisfy 0 < eig_min <= eig_max");

  Sampler rng(opts.seed);
  const Index n_a = opts.n_assets;
  std::vector<Matrix> blocks;
  std::vector<Vector> returns;
  const double log_lo = std::log(opts.eig_min);
  const double log_hi = std::log(opts.eig_max);
  for (Index j = 0; j < opts.periods; ++j) {
    Matrix gauss(n_a, n_a);
    for (Index c = 0; c < n_a; ++c)
      for (Index r = 0; r < n_a; ++r) gauss(r, c) = rng.normal();
    const Matrix Q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    Vector spectrum(n_a);
    for (Index i = 0; i < n_a; ++i) spectrum[i] = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
    Matrix C = Q.transpose() * spectrum.asDiagonal() * Q;
    C = (0.5 * (C + C.transpose())).eval();
    blocks.push_back(std::move(C));

    Vector r(n_a);
    for (Index i = 0; i < n_a; ++i) r[i] = opts.return_mean + opts.return_sd * rng.normal();
    returns.push_back(std::move(r));
  }
  const double xi_fin = naive_wealth(returns, opts.xi_ini).xi_naive;
  return build_model(std::move(blocks), std::move(returns), opts.xi_ini, xi_fin, opts.tau1, opts.tau2);
}

}  // namespace bregaccel
