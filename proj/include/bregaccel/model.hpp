#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bregaccel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// min <u, C u> + tau1 ||u||_1 + tau2 ||D u||_1  s.t.  A u = b.
///
/// The smooth part carries no 1/2 factor: f(u) = u'Cu, so grad f = 2Cu.
struct ConstrainedL1Problem {
  Matrix C;
  double tau1 = 0.0;
  double tau2 = 0.0;
  Matrix D;
  Matrix A;
  Vector b;

  Index n() const { return C.rows(); }
  Index q() const { return D.rows(); }
  Index m() const { return A.rows(); }

  /// Throws DimensionError or InvalidProblemError.
  void validate() const;

  double smooth_value(const Vector& u) const { return u.dot(C * u); }
  double objective(const Vector& u) const;
};

/// The problem written in the single variable x = [u; d]:
///
///   min F(x) + sum_i delta_i |x_i|  s.t.  M x = s,
///   M = [[A, 0], [D, -I]],  s = [b; 0],  F(x) = f(u).
///
/// Dense M is kept for inspection. Products go through the sparse copies.
struct StackedProblem {
  ConstrainedL1Problem source;

  Index n = 0;
  Index q = 0;
  Index m = 0;
  Index n_x = 0;
  Index n_s = 0;

  Matrix M;
  Vector s;
  Vector delta;

  /// Upper estimate of lambda_max(M'M).
  double M_norm_sq = 0.0;
  /// Upper estimate of the Lipschitz constant of grad F, i.e. 2 lambda_max(C).
  double smooth_lipschitz = 0.0;

  SparseMatrix M_sparse;
  SparseMatrix Mt_sparse;
  SparseMatrix C_sparse;

  Vector apply_M(const Vector& x) const { return M_sparse * x; }
  Vector apply_Mt(const Vector& y) const { return Mt_sparse * y; }

  auto u_block(const Vector& x) const { return x.head(n); }
  auto d_block(const Vector& x) const { return x.tail(q); }

  /// ||A u - b|| and ||D u - d|| at x = [u; d].
  double violation_A(const Vector& x) const;
  double violation_D(const Vector& x) const;
  /// ||M x - s||.
  double violation(const Vector& x) const { return (apply_M(x) - s).norm(); }

  /// sum_i delta_i |x_i|.
  double weighted_l1(const Vector& x) const;
};

/// Right-hand side shift s^k of the k-th Bregman subproblem and the penalty.
struct SubproblemState {
  Vector s_k;
  double lambda = 1.0;

  static SubproblemState initial(const StackedProblem& sp, double lambda) {
    return {Vector::Zero(sp.n_s), lambda};
  }
};

StackedProblem stack(const ConstrainedL1Problem& problem);

/// G^k(x) = F(x) + (lambda/2) ||M x - s^k||^2 and its gradient.
std::pair<double, Vector> smooth_value_grad(const StackedProblem& sp, const SubproblemState& state,
                                            const Vector& x);
double smooth_value(const StackedProblem& sp, const SubproblemState& state, const Vector& x);

/// H^k(x) = G^k(x) + sum_i delta_i |x_i|.
double subproblem_objective(const StackedProblem& sp, const SubproblemState& state, const Vector& x);

/// L + lambda ||M||^2, a Lipschitz bound for grad G^k valid for every k.
double lipschitz_bound(const StackedProblem& sp, double lambda);

/// Largest eigenvalue of a symmetric PSD operator by power iteration, inflated by 1.01.
/// `apply` maps a vector to the operator times that vector.
template <class Apply>
double power_iteration_upper(Apply&& apply, Index dim, int max_iters = 200, double rel_tol = 1e-8) {
  if (dim == 0) return 0.0;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(dim);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = apply(v);
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    const double next = std::max(rayleigh, norm);
    const bool settled = it > 0 && std::abs(next - estimate) <= rel_tol * std::abs(next);
    estimate = std::max(estimate, next);
    if (settled) break;
  }
  return 1.01 * estimate;
}

}  // namespace bregaccel
