#include "bregaccel/admm.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "bregaccel/error.hpp"
#include "bregaccel/prox_fista.hpp"
#include "bregaccel/subspace.hpp"

namespace bregaccel {

AdmmState AdmmState::zeros(const ConstrainedL1Problem& problem, double penalty) {
  AdmmState st;
  st.u = Vector::Zero(problem.n());
  st.v = Vector::Zero(problem.n());
  st.d = Vector::Zero(problem.q());
  st.w_A = Vector::Zero(problem.m());
  st.w_v = Vector::Zero(problem.n());
  st.w_D = Vector::Zero(problem.q());
  st.penalty = penalty;
  return st;
}

double admm_merit(const ConstrainedL1Problem& problem, const AdmmState& st) {
  const double rho = st.penalty;
  return problem.smooth_value(st.u) + problem.tau1 * st.v.lpNorm<1>() +
         problem.tau2 * st.d.lpNorm<1>() +
         0.5 * rho *
             ((problem.A * st.u - problem.b + st.w_A).squaredNorm() +
              (st.u - st.v + st.w_v).squaredNorm() + (problem.D * st.u - st.d + st.w_D).squaredNorm());
}

double minimize_piecewise_quadratic(double a, double b, const Vector& weights, const Vector& y,
                                    const Vector& p) {
  struct Kink {
    double t;
    double jump;
  };
  std::vector<Kink> kinks;
  double slope = 0.0;  // l1 contribution to the derivative left of every kink
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0 || weights[i] == 0.0) continue;
    const double w = weights[i] * std::abs(p[i]);
    kinks.push_back({-y[i] / p[i], 2.0 * w});
    slope -= w;
  }
  if (!(a > 0.0)) {
    if (kinks.empty()) return 0.0;
    throw NumericalError("one-dimensional search: direction without curvature");
  }
  std::sort(kinks.begin(), kinks.end(), [](const Kink& l, const Kink& r) { return l.t < r.t; });

  // derivative on an open interval is 2 a t + b + slope
  for (const Kink& kink : kinks) {
    const double t = -(b + slope) / (2.0 * a);
    if (t < kink.t) return t;
    if (2.0 * a * kink.t + b + slope + kink.jump >= 0.0) return kink.t;
    slope += kink.jump;
  }
  return -(b + slope) / (2.0 * a);
}

namespace {

SparseMatrix sparse_of(const Matrix& dense) {
  return dense.sparseView(0.0, 0.0);
}

// Exact line minimization of the merit along y + t p, p = y_new - y_old.
bool accelerate_step(const ConstrainedL1Problem& problem, const SparseMatrix& A, const SparseMatrix& D,
                     const SparseMatrix& C, AdmmState& st, const Vector& pu, const Vector& pv,
                     const Vector& pd) {
  const double rho = st.penalty;
  const Vector Cu = C * st.u;
  const Vector Cp = C * pu;
  const Vector Ap = A * pu;
  const Vector Dp = D * pu - pd;
  const Vector pdiff = pu - pv;
  const Vector eA = A * st.u - problem.b + st.w_A;
  const Vector ev = st.u - st.v + st.w_v;
  const Vector eD = D * st.u - st.d + st.w_D;

  const double a = pu.dot(Cp) + 0.5 * rho * (Ap.squaredNorm() + pdiff.squaredNorm() + Dp.squaredNorm());
  const double b = 2.0 * pu.dot(Cu) + rho * (eA.dot(Ap) + ev.dot(pdiff) + eD.dot(Dp));
  if (!(a > 0.0)) return false;

  const Index n = st.v.size();
  const Index q = st.d.size();
  Vector weights(n + q), y(n + q), p(n + q);
  weights << Vector::Constant(n, problem.tau1), Vector::Constant(q, problem.tau2);
  y << st.v, st.d;
  p << pv, pd;
  const double t = minimize_piecewise_quadratic(a, b, weights, y, p);
  if (!std::isfinite(t) || t == 0.0) return false;

  AdmmState trial = st;
  trial.u += t * pu;
  trial.v += t * pv;
  trial.d += t * pd;
  if (!(admm_merit(problem, trial) < admm_merit(problem, st))) return false;
  st = std::move(trial);
  return true;
}

}  // namespace

SolveReport admm_solve(const ConstrainedL1Problem& problem, const AdmmConfig& cfg) {
  problem.validate();
  if (!(cfg.penalty > 0.0) || !(cfg.tol_b > 0.0) || !(cfg.tol_cg > 0.0) || cfg.max_iters < 1)
    throw InvalidProblemError("invalid ADMM configuration");
  const auto started = std::chrono::steady_clock::now();

  const double rho = cfg.penalty;
  const Index n = problem.n();
  const Index m = problem.m();
  const Index q = problem.q();
  const SparseMatrix A = sparse_of(problem.A);
  const SparseMatrix D = sparse_of(problem.D);
  const SparseMatrix C = sparse_of(problem.C);
  const SparseMatrix At = A.transpose();
  const SparseMatrix Dt = D.transpose();
  SparseMatrix identity(n, n);
  identity.setIdentity();
  const SparseMatrix K = 2.0 * C + rho * (At * A + identity + Dt * D);

  SolveReport report;
  report.solver = "admm";
  report.lambda = rho;
  report.message = "exact line search on the augmented Lagrangian";

  AdmmState st = AdmmState::zeros(problem, rho);
  auto primal_residuals = [&](const AdmmState& s) {
    return std::array<double, 3>{(A * s.u - problem.b).norm(), (D * s.u - s.d).norm(),
                                 (s.u - s.v).norm()};
  };

  int k = 0;
  try {
    for (;; ++k) {
      const auto [rA, rD, rv] = primal_residuals(st);
      if (rA <= cfg.tol_b && rD <= cfg.tol_b && rv <= cfg.tol_b) {
        report.termination = Termination::converged;
        break;
      }
      if (k >= cfg.max_iters) {
        report.termination = Termination::max_outer;
        break;
      }

      const AdmmState previous = st;
      const Vector rhs =
          rho * (At * (problem.b - st.w_A) + (st.v - st.w_v) + Dt * (st.d - st.w_D));
      const CgResult cg = conjugate_gradient([&](const Vector& w) -> Vector { return K * w; }, rhs,
                                             st.u, cfg.tol_cg, cg_iteration_cap(n));
      report.inner.cg_iters += cg.iterations;
      ++report.inner.cg_calls;
      st.u = cg.w;

      const Vector Du = D * st.u;
      st.v = prox_weighted_l1(st.u + st.w_v, Vector::Constant(n, problem.tau1), 1.0 / rho);
      st.d = prox_weighted_l1(Du + st.w_D, Vector::Constant(q, problem.tau2), 1.0 / rho);

      st.w_A += A * st.u - problem.b;
      st.w_v += st.u - st.v;
      st.w_D += Du - st.d;

      Branch branch = Branch::standard;
      if (cfg.accelerate &&
          accelerate_step(problem, A, D, C, st, st.u - previous.u, st.v - previous.v,
                          st.d - previous.d)) {
        ++report.accel_steps_taken;
        branch = Branch::accelerated;
      }
      if (!st.u.allFinite() || !st.v.allFinite() || !st.d.allFinite())
        throw NumericalError("ADMM produced non-finite iterates");

      if (cfg.record_trace) {
        IterationRecord rec;
        rec.k = k + 1;
        rec.violation_A = (A * st.u - problem.b).norm();
        rec.violation_D = (D * st.u - st.d).norm();
        rec.violation = std::hypot(rec.violation_A, rec.violation_D);
        rec.subproblem_value = admm_merit(problem, st);
        rec.branch = branch;
        report.trace.push_back(rec);
      }
    }
  } catch (const NumericalError& err) {
    report.termination = Termination::numerical_error;
    report.message = err.what();
  }

  report.outer_iters = k;
  report.x_final.resize(n + q);
  report.x_final << st.u, st.d;
  report.final_shift = Vector::Zero(m + q);
  report.final_shift.head(m) = problem.b;
  report.final_shift.head(m) -= st.w_A;
  report.final_shift.tail(q) = -st.w_D;
  report.objective = problem.objective(st.u);
  report.violation_A = (A * st.u - problem.b).norm();
  report.violation_D = (D * st.u - st.d).norm();
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace bregaccel
