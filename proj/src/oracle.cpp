#include "bregaccel/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bregaccel/error.hpp"

namespace bregaccel {

namespace {

constexpr double kFeasibilityTol = 1e-10;

struct FaceSolution {
  bool feasible = false;
  Vector u;
};

// min u'Cu + c'u  s.t.  E u = r, through a particular solution plus the null space of E.
FaceSolution solve_face(const Matrix& C, const Vector& c, const Matrix& E, const Vector& r) {
  FaceSolution out;
  const Index n = C.rows();
  Vector u0 = Vector::Zero(n);
  Matrix Z = Matrix::Identity(n, n);
  if (E.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(E);
    u0 = cod.solve(r);
    const double scale = 1.0 + r.lpNorm<Eigen::Infinity>();
    if ((E * u0 - r).lpNorm<Eigen::Infinity>() > kFeasibilityTol * scale) return out;
    Eigen::FullPivLU<Matrix> lu(E);
    Z = lu.kernel();
    if (Z.cols() == 1 && Z.norm() == 0.0) Z.resize(n, 0);
  }
  out.feasible = true;
  if (Z.cols() == 0) {
    out.u = u0;
    return out;
  }
  // gradient of u'Cu + c'u is 2Cu + c
  const Matrix reduced = 2.0 * Z.transpose() * C * Z;
  const Vector rhs = -Z.transpose() * (2.0 * C * u0 + c);
  out.u = u0 + Z * reduced.ldlt().solve(rhs);
  return out;
}

}  // namespace

OracleSolution enumerate_solve(const ConstrainedL1Problem& problem) {
  problem.validate();
  const Index n = problem.n();
  const Index q = problem.q();
  const Index m = problem.m();
  const Index n_x = n + q;
  if (n_x > kOracleMaxVariables)
    throw InvalidProblemError("oracle limited to " + std::to_string(kOracleMaxVariables) +
                              " stacked variables, got " + std::to_string(n_x));

  long total = 1;
  for (Index i = 0; i < n_x; ++i) total *= 3;

  OracleSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  bool any_feasible = false;
  std::vector<int> sigma(static_cast<std::size_t>(n_x), -1);

  for (long code = 0; code < total; ++code) {
    long rest = code;
    Index zeros = 0;
    for (Index i = 0; i < n_x; ++i) {
      sigma[static_cast<std::size_t>(i)] = static_cast<int>(rest % 3) - 1;
      rest /= 3;
      if (sigma[static_cast<std::size_t>(i)] == 0) ++zeros;
    }
    ++best.patterns_examined;

    Matrix E(m + zeros, n);
    Vector r = Vector::Zero(m + zeros);
    E.topRows(m) = problem.A;
    r.head(m) = problem.b;
    Vector c = Vector::Zero(n);
    Index row = m;
    for (Index i = 0; i < n; ++i) {
      const int s = sigma[static_cast<std::size_t>(i)];
      if (s == 0) {
        E.row(row++) = Vector::Unit(n, i).transpose();
      } else {
        c[i] += problem.tau1 * s;
      }
    }
    for (Index j = 0; j < q; ++j) {
      const int s = sigma[static_cast<std::size_t>(n + j)];
      if (s == 0) {
        E.row(row++) = problem.D.row(j);
      } else {
        c += problem.tau2 * s * problem.D.row(j).transpose();
      }
    }

    const FaceSolution face = solve_face(problem.C, c, E, r);
    if (!face.feasible) continue;
    any_feasible = true;

    const Vector du = problem.D * face.u;
    bool consistent = true;
    for (Index i = 0; i < n_x && consistent; ++i) {
      const int s = sigma[static_cast<std::size_t>(i)];
      const double v = i < n ? face.u[i] : du[i - n];
      if ((s > 0 && v < 0.0) || (s < 0 && v > 0.0)) consistent = false;
    }
    if (!consistent) continue;
    ++best.patterns_consistent;

    const double objective = problem.objective(face.u);
    // strict comparison keeps the lexicographically first pattern on ties
    if (objective < best.objective) {
      best.objective = objective;
      best.u = face.u;
      best.pattern = sigma;
    }
  }

  if (!any_feasible || best.u.size() == 0) throw InfeasibleError("no face admits A u = b");
  return best;
}

}  // namespace bregaccel
