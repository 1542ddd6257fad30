#pragma once

#include <cmath>
#include <string>

#include "bregaccel/error.hpp"
#include "bregaccel/model.hpp"

namespace bregaccel {

struct FistaConfig {
  /// Stop when two successive iterates are closer than this.
  double tol_f = 1e-5;
  int max_iters = 5000;
};

struct FistaResult {
  Vector x;
  int iterations = 0;
  /// ||g(x)||_inf, the min-norm subgradient of the composite objective at x.
  double residual = 0.0;
};

inline double soft_threshold(double v, double t) {
  const double shrunk = std::abs(v) - t;
  return shrunk > 0.0 ? std::copysign(shrunk, v) : 0.0;
}

/// Componentwise soft_threshold(v_i, step * delta_i).
Vector prox_weighted_l1(const Vector& v, const Vector& delta, double step);

/// ||min-norm subgradient||_inf of G + sum delta_i |x_i| given grad G at x.
double stationarity_residual(const Vector& grad, const Vector& delta, const Vector& x);

/// Monotone FISTA with constant step 1/lipschitz for min G(x) + sum delta_i |x_i|.
///
/// `smooth` must provide `double value(const Vector&)` and `Vector gradient(const Vector&)`.
/// The accelerated point is kept only when it does not increase the objective; otherwise
/// a plain proximal-gradient step from the current iterate is taken instead.
template <class Smooth>
FistaResult fista(const Smooth& smooth, const Vector& delta, const Vector& x0, double lipschitz,
                  const FistaConfig& cfg) {
  if (delta.size() != x0.size())
    throw DimensionError("delta", "x0",
                         std::to_string(delta.size()) + " vs " + std::to_string(x0.size()));
  if (!(lipschitz > 0.0)) throw NumericalError("FISTA requires a positive Lipschitz constant");

  const double step = 1.0 / lipschitz;
  auto composite = [&](const Vector& x) {
    return smooth.value(x) + delta.cwiseProduct(x.cwiseAbs()).sum();
  };

  Vector x = x0;
  Vector y = x0;
  double h_x = composite(x);
  double t = 1.0;
  int it = 0;
  while (it < cfg.max_iters) {
    ++it;
    Vector z = prox_weighted_l1(y - step * smooth.gradient(y), delta, step);
    double h_z = composite(z);
    if (!(h_z <= h_x)) {
      z = prox_weighted_l1(x - step * smooth.gradient(x), delta, step);
      h_z = composite(z);
      if (!(h_z <= h_x)) {
        // Rounding floor reached: the plain step no longer decreases.
        if (!std::isfinite(h_z)) throw NumericalError("FISTA produced a non-finite objective");
        z = x;
        h_z = h_x;
      }
    }
    if (!std::isfinite(h_z)) throw NumericalError("FISTA produced a non-finite objective");

    const double displacement = (z - x).norm();
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / t_next) * (z - x);
    x = std::move(z);
    h_x = h_z;
    t = t_next;
    if (displacement <= cfg.tol_f) break;
  }

  FistaResult out;
  out.residual = stationarity_residual(smooth.gradient(x), delta, x);
  out.x = std::move(x);
  out.iterations = it;
  return out;
}

/// Approximately solves the Bregman subproblem min_x H^k(x) from the warm start x0.
FistaResult fista_minimize(const StackedProblem& sp, const SubproblemState& state, const Vector& x0,
                           const FistaConfig& cfg);

}  // namespace bregaccel
