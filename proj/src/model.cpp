#include "bregaccel/model.hpp"

#include <string>
#include <vector>

#include "bregaccel/error.hpp"

namespace bregaccel {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

SparseMatrix to_sparse(const Matrix& dense) {
  std::vector<Eigen::Triplet<double>> entries;
  for (Index j = 0; j < dense.cols(); ++j)
    for (Index i = 0; i < dense.rows(); ++i)
      if (dense(i, j) != 0.0) entries.emplace_back(i, j, dense(i, j));
  SparseMatrix out(dense.rows(), dense.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  out.makeCompressed();
  return out;
}

}  // namespace

void ConstrainedL1Problem::validate() const {
  if (C.rows() != C.cols()) throw DimensionError("C rows", "C cols", shape(C));
  if (D.cols() != n()) throw DimensionError("D", "C", "D is " + shape(D) + ", C is " + shape(C));
  if (A.cols() != n()) throw DimensionError("A", "C", "A is " + shape(A) + ", C is " + shape(C));
  if (b.size() != A.rows())
    throw DimensionError("b", "A", "b has " + std::to_string(b.size()) + " entries, A is " + shape(A));
  if (!(tau1 >= 0.0) || !(tau2 >= 0.0)) throw InvalidProblemError("tau1 and tau2 must be nonnegative");
  if (!C.allFinite() || !D.allFinite() || !A.allFinite() || !b.allFinite())
    throw InvalidProblemError("problem data contains non-finite entries");

  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidProblemError("C is not symmetric");
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success) throw InvalidProblemError("C is not positive definite");
}

double ConstrainedL1Problem::objective(const Vector& u) const {
  return smooth_value(u) + tau1 * u.lpNorm<1>() + tau2 * (D * u).lpNorm<1>();
}

double StackedProblem::violation_A(const Vector& x) const {
  return (source.A * u_block(x) - source.b).norm();
}

double StackedProblem::violation_D(const Vector& x) const {
  return (source.D * u_block(x) - d_block(x)).norm();
}

double StackedProblem::weighted_l1(const Vector& x) const {
  return delta.cwiseProduct(x.cwiseAbs()).sum();
}

StackedProblem stack(const ConstrainedL1Problem& problem) {
  problem.validate();

  StackedProblem sp;
  sp.source = problem;
  sp.n = problem.n();
  sp.q = problem.q();
  sp.m = problem.m();
  sp.n_x = sp.n + sp.q;
  sp.n_s = sp.m + sp.q;

  sp.M = Matrix::Zero(sp.n_s, sp.n_x);
  sp.M.topLeftCorner(sp.m, sp.n) = problem.A;
  sp.M.bottomLeftCorner(sp.q, sp.n) = problem.D;
  sp.M.bottomRightCorner(sp.q, sp.q) = -Matrix::Identity(sp.q, sp.q);

  sp.s = Vector::Zero(sp.n_s);
  sp.s.head(sp.m) = problem.b;

  sp.delta.resize(sp.n_x);
  sp.delta.head(sp.n).setConstant(problem.tau1);
  sp.delta.tail(sp.q).setConstant(problem.tau2);

  sp.M_sparse = to_sparse(sp.M);
  sp.Mt_sparse = sp.M_sparse.transpose();
  sp.Mt_sparse.makeCompressed();
  sp.C_sparse = to_sparse(problem.C);

  sp.M_norm_sq = power_iteration_upper(
      [&](const Vector& v) -> Vector { return sp.Mt_sparse * (sp.M_sparse * v); }, sp.n_x);
  sp.smooth_lipschitz =
      2.0 * power_iteration_upper([&](const Vector& v) -> Vector { return sp.C_sparse * v; }, sp.n);
  return sp;
}

std::pair<double, Vector> smooth_value_grad(const StackedProblem& sp, const SubproblemState& state,
                                            const Vector& x) {
  if (x.size() != sp.n_x)
    throw DimensionError("x", "stacked problem",
                         std::to_string(x.size()) + " vs n_x=" + std::to_string(sp.n_x));
  const Vector Cu = sp.C_sparse * x.head(sp.n);
  const Vector residual = sp.apply_M(x) - state.s_k;
  const double value = x.head(sp.n).dot(Cu) + 0.5 * state.lambda * residual.squaredNorm();
  Vector grad = state.lambda * sp.apply_Mt(residual);
  grad.head(sp.n) += 2.0 * Cu;
  return {value, std::move(grad)};
}

double smooth_value(const StackedProblem& sp, const SubproblemState& state, const Vector& x) {
  if (x.size() != sp.n_x)
    throw DimensionError("x", "stacked problem",
                         std::to_string(x.size()) + " vs n_x=" + std::to_string(sp.n_x));
  const Vector Cu = sp.C_sparse * x.head(sp.n);
  return x.head(sp.n).dot(Cu) + 0.5 * state.lambda * (sp.apply_M(x) - state.s_k).squaredNorm();
}

double subproblem_objective(const StackedProblem& sp, const SubproblemState& state, const Vector& x) {
  return smooth_value(sp, state, x) + sp.weighted_l1(x);
}

double lipschitz_bound(const StackedProblem& sp, double lambda) {
  return sp.smooth_lipschitz + lambda * sp.M_norm_sq;
}

}  // namespace bregaccel
