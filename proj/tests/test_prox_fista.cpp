#include <doctest.h>

#include <limits>
#include <random>

#include "bregaccel/prox_fista.hpp"
#include "bregaccel/subspace.hpp"
#include "support.hpp"

using namespace bregaccel;

namespace {

// (x - c)' diag(w) (x - c)
struct SeparableQuadratic {
  Vector c;
  Vector w;
  double value(const Vector& x) const { return (x - c).cwiseAbs2().cwiseProduct(w).sum(); }
  Vector gradient(const Vector& x) const { return 2.0 * w.cwiseProduct(x - c); }
};

}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(5, 2) == 3);
  CHECK(soft_threshold(-1, 2) == 0);
  CHECK(soft_threshold(0, 7) == 0);
  CHECK(soft_threshold(-5, 2) == -3);
}

TEST_CASE("weighted prox") {
  Vector v(2);
  v << 3, -3;
  Vector delta(2);
  delta << 1, 0;
  CHECK(prox_weighted_l1(v, delta, 1.0) == Vector((Vector(2) << 2, -3).finished()));
  CHECK(prox_weighted_l1(v, Vector::Zero(2), 3.0) == v);
  Vector half(2);
  half << 0.5, -0.5;
  CHECK(prox_weighted_l1(half, Vector::Ones(2), 1.0) == Vector::Zero(2));
}

TEST_CASE("weighted prox is nonexpansive") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    Vector a(6), b(6), delta(6);
    for (int i = 0; i < 6; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
      delta[i] = std::abs(g(rng));
    }
    CHECK((prox_weighted_l1(a, delta, 0.7) - prox_weighted_l1(b, delta, 0.7)).norm() <=
          (a - b).norm() + 1e-15);
  }
}

TEST_CASE("FISTA on a one-dimensional problem") {
  SeparableQuadratic f{Vector::Constant(1, 3.0), Vector::Ones(1)};
  FistaConfig cfg;
  cfg.tol_f = 1e-12;
  const FistaResult r = fista(f, Vector::Ones(1), Vector::Zero(1), 2.0, cfg);
  CHECK(r.x[0] == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(r.residual <= 1e-9);
}

TEST_CASE("FISTA stops quickly at a stationary start") {
  SeparableQuadratic f{Vector::Constant(1, 3.0), Vector::Ones(1)};
  const FistaResult r = fista(f, Vector::Ones(1), Vector::Constant(1, 2.5), 2.0, FistaConfig{});
  CHECK(r.iterations <= 2);
  CHECK(r.x[0] == doctest::Approx(2.5));
}

TEST_CASE("FISTA rejects inconsistent input") {
  SeparableQuadratic f{Vector::Zero(2), Vector::Ones(2)};
  CHECK_THROWS_AS(fista(f, Vector::Ones(3), Vector::Zero(2), 1.0, FistaConfig{}), DimensionError);
  CHECK_THROWS_AS(fista(f, Vector::Ones(2), Vector::Zero(2), 0.0, FistaConfig{}), NumericalError);
}

TEST_CASE("FISTA on the Bregman subproblem is monotone and near stationary") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int inst = 0; inst < 10; ++inst) {
    const auto pm = testsupport::well_posed_portfolio(100 + inst, 3, 2);
    const StackedProblem sp = stack(pm.assembled);
    SubproblemState state = SubproblemState::initial(sp, 1.0);
    for (Index i = 0; i < sp.n_s; ++i) state.s_k[i] = sp.s[i] + 0.1 * g(rng);
    Vector x0(sp.n_x);
    for (Index i = 0; i < sp.n_x; ++i) x0[i] = g(rng);
    FistaConfig cfg;
    const FistaResult r = fista_minimize(sp, state, x0, cfg);
    CHECK(subproblem_objective(sp, state, r.x) <= subproblem_objective(sp, state, x0));
    if (r.iterations < cfg.max_iters) {
      const double L = lipschitz_bound(sp, state.lambda);
      // the displacement test bounds the prox-gradient residual by roughly L * tol_f
      CHECK(r.residual <= 10.0 * L * cfg.tol_f);
    }
  }
}

TEST_CASE("FISTA matches an enumerated subproblem minimizer") {
  ConstrainedL1Problem p;
  p.C = Matrix(2, 2);
  p.C << 2, 0.3, 0.3, 1;
  p.tau1 = 0.3;
  p.tau2 = 0.2;
  p.D = Matrix(1, 2);
  p.D << -1, 1;
  p.A = Matrix::Ones(1, 2);
  p.b = Vector::Ones(1);
  const StackedProblem sp = stack(p);
  SubproblemState state = SubproblemState::initial(sp, 1.0);
  state.s_k << 1.5, 0.4;

  // H = 0.5 x'Qx - c'x + const + sum delta |x|; every sign pattern fixes a linear system
  Matrix Q = state.lambda * sp.M.transpose() * sp.M;
  Q.topLeftCorner(2, 2) += 2.0 * p.C;
  const Vector c = state.lambda * sp.M.transpose() * state.s_k;
  double best = std::numeric_limits<double>::infinity();
  for (int code = 0; code < 27; ++code) {
    int rest = code;
    std::vector<int> sigma(3);
    std::vector<Index> free;
    for (int i = 0; i < 3; ++i) {
      sigma[static_cast<std::size_t>(i)] = rest % 3 - 1;
      rest /= 3;
      if (sigma[static_cast<std::size_t>(i)] != 0) free.push_back(i);
    }
    Vector x = Vector::Zero(3);
    if (!free.empty()) {
      const Index k = static_cast<Index>(free.size());
      Matrix Qf(k, k);
      Vector cf(k);
      for (Index a = 0; a < k; ++a) {
        cf[a] = c[free[a]] - sp.delta[free[a]] * sigma[static_cast<std::size_t>(free[a])];
        for (Index b = 0; b < k; ++b) Qf(a, b) = Q(free[a], free[b]);
      }
      const Vector xf = Qf.ldlt().solve(cf);
      bool consistent = true;
      for (Index a = 0; a < k; ++a) {
        consistent = consistent && xf[a] * sigma[static_cast<std::size_t>(free[a])] > 0.0;
        x[free[a]] = xf[a];
      }
      if (!consistent) continue;
    }
    best = std::min(best, subproblem_objective(sp, state, x));
  }

  FistaConfig cfg;
  cfg.tol_f = 1e-12;
  cfg.max_iters = 100000;
  const FistaResult r = fista_minimize(sp, state, Vector::Zero(3), cfg);
  CHECK(std::abs(subproblem_objective(sp, state, r.x) - best) <= 1e-6);
  CHECK(subproblem_objective(sp, state, r.x) >= best - 1e-12);
}
