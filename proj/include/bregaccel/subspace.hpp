#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bregaccel/error.hpp"
#include "bregaccel/model.hpp"

namespace bregaccel {

/// Sign-based split of the coordinates of x. Zero means exactly 0.0.
struct ActiveSetPartition {
  std::vector<Index> plus;
  std::vector<Index> minus;
  std::vector<Index> zero;
  /// plus and minus merged, ascending.
  std::vector<Index> nonzero;
  Index size = 0;
};

ActiveSetPartition partition(const Vector& x);

/// Min-norm subgradient of G + sum delta_i |x_i| given grad G.
Vector min_norm_subgradient(const Vector& grad, const Vector& delta, const ActiveSetPartition& part);

/// beta measures optimality on the zero variables, phi on the nonzero ones.
/// phi is clamped by x_i so that it never asks a variable to cross zero.
struct OptimalityMeasures {
  Vector g;
  Vector beta;
  Vector phi;
};

OptimalityMeasures compute_beta_phi(const Vector& grad, const Vector& delta, const Vector& x);

struct GammaState {
  double gamma = 10.0;
  double decrease = 0.9;
  double increase = 1.1;
};

enum class StepKind { accelerate, standard };

/// Accelerate iff ||beta|| <= gamma ||phi||; gamma shrinks on accelerate, grows otherwise.
StepKind switching_test(const OptimalityMeasures& meas, GammaState& gs);

/// H^k restricted to the affine face {x : x_i = 0 for i in A_0(x_ref)} with the l1 term
/// replaced by the linear term nu_i x_i, nu_i = sign(x_ref_i) delta_i.
///
/// Over the free coordinates w it reads
///   0.5 w'Qw - rhs'w + const,   Q = P (2C (+) 0 + lambda M'M) P',  rhs = lambda P M's^k - nu.
class ReducedQuadratic {
 public:
  ReducedQuadratic(const StackedProblem& sp, SubproblemState state, std::vector<Index> free,
                   Vector nu);

  Index size() const { return static_cast<Index>(free_.size()); }
  const std::vector<Index>& free_indices() const { return free_; }
  const Vector& nu() const { return nu_; }
  const Vector& rhs() const { return rhs_; }

  Vector scatter(const Vector& w) const;
  Vector gather(const Vector& x) const;

  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;
  Vector hess_mul(const Vector& w) const;

 private:
  const StackedProblem* sp_;
  SubproblemState state_;
  std::vector<Index> free_;
  Vector nu_;
  Vector rhs_;
};

/// Throws InvalidProblemError when x has no nonzero entry.
ReducedQuadratic restricted_problem(const StackedProblem& sp, const SubproblemState& state,
                                    const ActiveSetPartition& part, const Vector& x);

struct CgResult {
  Vector w;
  int iterations = 0;
  /// ||rho^l|| / ||rho^0||, 0 when the start was already exact.
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients on apply(w) = rhs from w0, stopping when ||rho^l|| <= tol ||rho^0||.
template <class Apply>
CgResult conjugate_gradient(Apply&& apply, const Vector& rhs, Vector w0, double tol, int max_iters) {
  CgResult out;
  Vector r = rhs - apply(w0);
  const double r0 = r.norm();
  out.w = std::move(w0);
  if (!std::isfinite(r0)) throw NumericalError("CG: non-finite initial residual");
  if (r0 == 0.0) {
    out.converged = true;
    return out;
  }
  Vector p = r;
  double rr = r.squaredNorm();
  while (out.iterations < max_iters) {
    const Vector Ap = apply(p);
    const double curvature = p.dot(Ap);
    if (!(curvature > 0.0)) throw NumericalError("CG breakdown: non-positive curvature");
    const double alpha = rr / curvature;
    out.w += alpha * p;
    r -= alpha * Ap;
    ++out.iterations;
    const double rr_next = r.squaredNorm();
    if (!std::isfinite(rr_next)) throw NumericalError("CG: non-finite residual");
    out.relative_residual = std::sqrt(rr_next) / r0;
    if (out.relative_residual <= tol) {
      out.converged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return out;
}

CgResult cg_solve(const ReducedQuadratic& reduced, const Vector& w0, double tol_cg, int max_iters);

/// Half the subproblem size, at least one.
inline int cg_iteration_cap(Index reduced_size) {
  return std::max<int>(1, static_cast<int>(reduced_size / 2));
}

/// Orthogonal projection of z onto the closed orthant face containing x_ref.
Vector project_onto_face(const Vector& z, const Vector& x_ref);

struct LineSearchResult {
  Vector x;
  double step = 1.0;
  int trials = 0;
  double h_before = 0.0;
  double h_after = 0.0;
};

inline constexpr int kMaxBacktracks = 60;

/// Projected backtracking from x_k towards z_next with alpha = 1, 1/2, 1/4, ...
///
/// Accepts the first trial point with
///   H^k(x+) - H^k(x_k) <= eta <grad H^k_face(x_k), x+ - x_k>   and   H^k(x+) <= H^k(x_k),
/// where grad H^k_face is grad G^k + nu on the nonzero coordinates and 0 elsewhere.
/// Throws LineSearchError after kMaxBacktracks halvings.
LineSearchResult line_search(const StackedProblem& sp, const SubproblemState& state, const Vector& x_k,
                             const Vector& z_next, double eta);

}  // namespace bregaccel
