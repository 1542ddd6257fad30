#include <doctest.h>

#include "bregaccel/driver.hpp"
#include "bregaccel/oracle.hpp"
#include "support.hpp"

using namespace bregaccel;

namespace {

SolverConfig tight(Mode mode) {
  SolverConfig cfg;
  cfg.mode = mode;
  cfg.tol_b = 1e-8;
  cfg.fista.tol_f = 1e-12;
  cfg.fista.max_iters = 100000;
  return cfg;
}

StackedProblem scalar_problem() {
  ConstrainedL1Problem p;
  p.C = Matrix::Identity(1, 1);
  p.A = Matrix::Identity(1, 1);
  p.D = Matrix::Zero(0, 1);
  p.b = Vector::Zero(1);
  return stack(p);
}

}  // namespace

TEST_CASE("mode and safeguard names round trip") {
  for (Mode m : {Mode::sbsa, Mode::sbsa_lsa, Mode::sb}) CHECK(parse_mode(to_string(m)) == m);
  for (Safeguard s : {Safeguard::heuristic_accept, Safeguard::strict_reject})
    CHECK(parse_safeguard(to_string(s)) == s);
  CHECK_FALSE(parse_mode("fista").has_value());
  CHECK_FALSE(parse_safeguard("maybe").has_value());
}

TEST_CASE("config defaults and validation") {
  SolverConfig cfg;
  CHECK(cfg.lambda == 1.0);
  CHECK(cfg.tol_b == 1e-4);
  CHECK(cfg.max_outer == 10000);
  CHECK(cfg.warmstart_iters == 5);
  CHECK(cfg.eta == 0.1);
  CHECK(cfg.gamma0 == 10.0);
  CHECK(cfg.tol_cg == 1e-2);
  CHECK(cfg.fista.tol_f == 1e-5);
  CHECK(cfg.fista.max_iters == 5000);
  CHECK(cfg.safeguard == Safeguard::heuristic_accept);
  CHECK_NOTHROW(cfg.validate());
  cfg.tol_b = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidProblemError);
  cfg = SolverConfig{};
  cfg.warmstart_iters = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidProblemError);
  cfg = SolverConfig{};
  cfg.lambda = -2.0;
  CHECK_THROWS_AS(solve(scalar_problem(), cfg), InvalidProblemError);
}

TEST_CASE("safeguard policies") {
  const StackedProblem sp = scalar_problem();
  const Vector half = Vector::Constant(1, 0.5);
  const Vector less = Vector::Constant(1, 0.4);
  const Vector more = Vector::Constant(1, 0.6);
  CHECK(safeguard(sp, half, less, Safeguard::strict_reject).accept);
  CHECK(safeguard(sp, half, less, Safeguard::heuristic_accept).accept);
  CHECK_FALSE(safeguard(sp, half, less, Safeguard::heuristic_accept).force_standard_next);
  CHECK_FALSE(safeguard(sp, half, more, Safeguard::strict_reject).accept);
  const SafeguardVerdict v = safeguard(sp, half, more, Safeguard::heuristic_accept);
  CHECK(v.accept);
  CHECK(v.force_standard_next);
}

TEST_CASE("zero problem converges at the first check") {
  ConstrainedL1Problem p;
  p.C = Matrix::Identity(3, 3);
  p.tau1 = 0.1;
  p.tau2 = 0.1;
  p.D = Matrix(2, 3);
  p.D << -1, 1, 0, 0, -1, 1;
  p.A = Matrix::Ones(1, 3);
  p.b = Vector::Zero(1);
  for (Mode m : {Mode::sbsa, Mode::sbsa_lsa, Mode::sb}) {
    SolverConfig cfg;
    cfg.mode = m;
    const SolveReport r = solve(stack(p), cfg);
    CHECK(r.termination == Termination::converged);
    CHECK(r.outer_iters == 1);
    CHECK(r.x_final.isZero(0.0));
    CHECK(r.accel_steps_taken == 0);
  }
}

TEST_CASE("every mode matches the oracle at tight tolerance") {
  for (int inst = 0; inst < 6; ++inst) {
    const auto pm = testsupport::well_posed_portfolio(300 + inst, 2 + inst % 2, 1 + inst % 2 + (inst > 3));
    if (pm.assembled.n() + pm.assembled.q() > kOracleMaxVariables) continue;
    const OracleSolution o = enumerate_solve(pm.assembled);
    const StackedProblem sp = stack(pm.assembled);
    for (Mode m : {Mode::sbsa, Mode::sbsa_lsa, Mode::sb}) {
      const SolveReport r = solve(sp, tight(m));
      CHECK(r.termination == Termination::converged);
      CHECK(std::abs(r.objective - o.objective) <= 1e-6 * std::abs(o.objective));
    }
  }
}

TEST_CASE("converged reports respect the tolerance and the warm start") {
  for (int inst = 0; inst < 8; ++inst) {
    const auto pm = testsupport::well_posed_portfolio(60 + inst, 3, 2);
    const StackedProblem sp = stack(pm.assembled);
    for (Mode m : {Mode::sbsa, Mode::sbsa_lsa, Mode::sb}) {
      for (Safeguard g : {Safeguard::heuristic_accept, Safeguard::strict_reject}) {
        SolverConfig cfg;
        cfg.mode = m;
        cfg.safeguard = g;
        const SolveReport r = solve(sp, cfg);
        REQUIRE(r.termination == Termination::converged);
        CHECK(r.violation_A <= cfg.tol_b);
        CHECK(r.violation_D <= cfg.tol_b);
        CHECK(r.trace.size() == static_cast<std::size_t>(r.outer_iters));
        CHECK(r.trace.front().branch == Branch::initial);
        for (const IterationRecord& rec : r.trace) {
          const bool accelerated = rec.branch == Branch::accelerated || rec.branch == Branch::rejected;
          if (rec.k <= cfg.warmstart_iters + 1) CHECK_FALSE(accelerated);
          if (m == Mode::sb) CHECK_FALSE(accelerated);
          if (rec.branch == Branch::final_accelerated) CHECK(m == Mode::sbsa_lsa);
        }
        if (m == Mode::sb) CHECK(r.inner.cg_calls == 0);
      }
    }
  }
}

TEST_CASE("modes agree within the combined tolerance") {
  for (int inst = 0; inst < 8; ++inst) {
    const auto pm = testsupport::well_posed_portfolio(80 + inst, 3, 2);
    const StackedProblem sp = stack(pm.assembled);
    SolverConfig cfg;
    const double bound = 10.0 * cfg.tol_b * sp.delta.norm();
    cfg.mode = Mode::sbsa;
    const double a = solve(sp, cfg).objective;
    cfg.mode = Mode::sbsa_lsa;
    const double b = solve(sp, cfg).objective;
    cfg.mode = Mode::sb;
    const double c = solve(sp, cfg).objective;
    CHECK(std::abs(a - b) <= bound);
    CHECK(std::abs(a - c) <= bound);
  }
}

TEST_CASE("outer iteration cap") {
  const auto pm = testsupport::well_posed_portfolio(5, 3, 2);
  SolverConfig cfg;
  cfg.max_outer = 2;
  const SolveReport r = solve(stack(pm.assembled), cfg);
  CHECK(r.termination == Termination::max_outer);
  CHECK(r.outer_iters == 2);
}

TEST_CASE("solves are deterministic") {
  const auto pm = testsupport::well_posed_portfolio(6, 3, 2);
  const StackedProblem sp = stack(pm.assembled);
  const SolveReport a = solve(sp, SolverConfig{});
  const SolveReport b = solve(sp, SolverConfig{});
  CHECK(a.x_final == b.x_final);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].violation == b.trace[i].violation);
    CHECK(a.trace[i].subproblem_value == b.trace[i].subproblem_value);
    CHECK(a.trace[i].branch == b.trace[i].branch);
  }
}

TEST_CASE("exact subproblems give non-increasing violations in sb mode") {
  const auto pm = testsupport::well_posed_portfolio(11, 2, 2);
  SolverConfig cfg;
  cfg.mode = Mode::sb;
  cfg.fista.tol_f = 1e-10;
  cfg.fista.max_iters = 200000;
  const SolveReport r = solve(stack(pm.assembled), cfg);
  REQUIRE(r.termination == Termination::converged);
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i].violation <= r.trace[i - 1].violation + 1e-8);
}
