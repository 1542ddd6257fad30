#include "bregaccel/prox_fista.hpp"

#include "bregaccel/subspace.hpp"

namespace bregaccel {

namespace {

struct BregmanSmooth {
  const StackedProblem& sp;
  const SubproblemState& state;

  double value(const Vector& x) const { return smooth_value(sp, state, x); }
  Vector gradient(const Vector& x) const { return smooth_value_grad(sp, state, x).second; }
};

}  // namespace

Vector prox_weighted_l1(const Vector& v, const Vector& delta, double step) {
  if (v.size() != delta.size())
    throw DimensionError("v", "delta", std::to_string(v.size()) + " vs " + std::to_string(delta.size()));
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], step * delta[i]);
  return out;
}

double stationarity_residual(const Vector& grad, const Vector& delta, const Vector& x) {
  if (x.size() == 0) return 0.0;
  return min_norm_subgradient(grad, delta, partition(x)).lpNorm<Eigen::Infinity>();
}

FistaResult fista_minimize(const StackedProblem& sp, const SubproblemState& state, const Vector& x0,
                           const FistaConfig& cfg) {
  if (x0.size() != sp.n_x)
    throw DimensionError("x0", "stacked problem",
                         std::to_string(x0.size()) + " vs n_x=" + std::to_string(sp.n_x));
  return fista(BregmanSmooth{sp, state}, sp.delta, x0, lipschitz_bound(sp, state.lambda), cfg);
}

}  // namespace bregaccel
