#pragma once

#include "bregaccel/driver.hpp"
#include "bregaccel/model.hpp"

namespace bregaccel {

/// ADMM on the three-block split
///
///   min u'Cu + tau1 ||v||_1 + tau2 ||d||_1  s.t.  A u = b,  u - v = 0,  D u - d = 0,
///
/// in scaled form, followed by a one-dimensional search of the augmented Lagrangian
/// along the last primal displacement.
struct AdmmConfig {
  double penalty = 1.0;
  double tol_b = 1e-4;
  double tol_cg = 1e-2;
  int max_iters = 25000;
  bool accelerate = true;
  bool record_trace = true;
};

struct AdmmState {
  Vector u;
  Vector v;
  Vector d;
  /// Scaled multipliers of A u = b, u = v and D u = d.
  Vector w_A;
  Vector w_v;
  Vector w_D;
  double penalty = 1.0;

  static AdmmState zeros(const ConstrainedL1Problem& problem, double penalty);
};

/// Augmented Lagrangian of the split in scaled form, up to a constant in the multipliers.
double admm_merit(const ConstrainedL1Problem& problem, const AdmmState& state);

/// argmin over t of a t^2 + b t + sum_i w_i |y_i + t p_i| over the real line.
double minimize_piecewise_quadratic(double a, double b, const Vector& weights, const Vector& y,
                                    const Vector& p);

/// Runs ADMM. The report's x_final is [u; d] and final_shift is the Bregman right-hand side
/// implied by the multipliers, s - (penalty/lambda) [w_A; w_D] with lambda = penalty.
SolveReport admm_solve(const ConstrainedL1Problem& problem, const AdmmConfig& cfg);

}  // namespace bregaccel
