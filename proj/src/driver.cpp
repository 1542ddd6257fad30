#include "bregaccel/driver.hpp"

#include <chrono>

#include "bregaccel/error.hpp"
#include "bregaccel/subspace.hpp"

namespace bregaccel {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::sbsa: return "sbsa";
    case Mode::sbsa_lsa: return "sbsa_lsa";
    case Mode::sb: return "sb";
  }
  return "?";
}

const char* to_string(Safeguard safeguard) {
  switch (safeguard) {
    case Safeguard::heuristic_accept: return "heuristic_accept";
    case Safeguard::strict_reject: return "strict_reject";
  }
  return "?";
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::converged: return "converged";
    case Termination::max_outer: return "max_outer";
    case Termination::numerical_error: return "numerical_error";
  }
  return "?";
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::initial: return "initial";
    case Branch::standard: return "standard";
    case Branch::accelerated: return "accelerated";
    case Branch::rejected: return "rejected";
    case Branch::final_accelerated: return "final_accelerated";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "sbsa") return Mode::sbsa;
  if (name == "sbsa_lsa" || name == "sbsa-lsa") return Mode::sbsa_lsa;
  if (name == "sb") return Mode::sb;
  return std::nullopt;
}

std::optional<Safeguard> parse_safeguard(const std::string& name) {
  if (name == "heuristic_accept") return Safeguard::heuristic_accept;
  if (name == "strict_reject") return Safeguard::strict_reject;
  return std::nullopt;
}

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw InvalidProblemError(std::string(name) + " must be positive");
  };
  positive(lambda, "lambda");
  positive(tol_b, "tol_b");
  positive(eta, "eta");
  positive(gamma0, "gamma0");
  positive(tol_cg, "tol_cg");
  positive(fista.tol_f, "tol_f");
  if (max_outer < 1) throw InvalidProblemError("max_outer must be at least 1");
  if (fista.max_iters < 1) throw InvalidProblemError("fista max_iters must be at least 1");
  if (warmstart_iters < 0) throw InvalidProblemError("warmstart_iters must be nonnegative");
}

SafeguardVerdict safeguard(const StackedProblem& sp, const Vector& x_prev, const Vector& x_candidate,
                           Safeguard policy) {
  const bool increased = sp.violation(x_candidate) > sp.violation(x_prev);
  if (!increased) return {true, false};
  if (policy == Safeguard::strict_reject) return {false, false};
  return {true, true};
}

namespace {

struct Acceleration {
  Vector x;
  int cg_iters = 0;
  int trials = 0;
};

// CG on the face of x_k followed by the projected line search.
// Returns nothing when x_k has no free coordinate.
std::optional<Acceleration> accelerate(const StackedProblem& sp, const SubproblemState& state,
                                       const Vector& x_k, const SolverConfig& cfg) {
  const ActiveSetPartition part = partition(x_k);
  if (part.nonzero.empty()) return std::nullopt;
  const ReducedQuadratic reduced = restricted_problem(sp, state, part, x_k);
  const CgResult cg =
      cg_solve(reduced, reduced.gather(x_k), cfg.tol_cg, cg_iteration_cap(reduced.size()));
  LineSearchResult ls = line_search(sp, state, x_k, reduced.scatter(cg.w), cfg.eta);
  return Acceleration{std::move(ls.x), cg.iterations, ls.trials};
}

}  // namespace

SolveReport solve(const StackedProblem& sp, const SolverConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();

  SolveReport report;
  report.solver = to_string(cfg.mode);
  report.lambda = cfg.lambda;

  SubproblemState state = SubproblemState::initial(sp, cfg.lambda);
  Vector shift_of_x = state.s_k;
  Vector x = Vector::Zero(sp.n_x);
  GammaState gs;
  gs.gamma = cfg.gamma0;

  auto run_fista = [&](const Vector& start) {
    FistaResult fr = fista_minimize(sp, state, start, cfg.fista);
    report.inner.fista_iters += fr.iterations;
    ++report.inner.fista_calls;
    return std::move(fr.x);
  };
  auto record = [&](int k, Branch branch) {
    if (!cfg.record_trace) return;
    IterationRecord rec;
    rec.k = k;
    rec.violation_A = sp.violation_A(x);
    rec.violation_D = sp.violation_D(x);
    rec.violation = sp.violation(x);
    rec.subproblem_value = subproblem_objective(sp, state, x);
    rec.gamma = gs.gamma;
    rec.branch = branch;
    report.trace.push_back(rec);
  };

  int k = 1;
  try {
    x = run_fista(x);
    record(1, Branch::initial);
    Branch last = Branch::initial;
    bool force_standard = false;

    for (;; ++k) {
      if (sp.violation_A(x) <= cfg.tol_b && sp.violation_D(x) <= cfg.tol_b) {
        report.termination = Termination::converged;
        if (cfg.mode == Mode::sbsa_lsa && last != Branch::accelerated) {
          SubproblemState next = state;
          next.s_k += sp.s - sp.apply_M(x);
          std::optional<Acceleration> acc;
          try {
            acc = accelerate(sp, next, x, cfg);
          } catch (const LineSearchError&) {
            report.message = "final acceleration: line search failed, kept last iterate";
          }
          if (acc) {
            report.inner.cg_iters += acc->cg_iters;
            ++report.inner.cg_calls;
            report.inner.line_search_trials += acc->trials;
            if (sp.violation_A(acc->x) <= cfg.tol_b && sp.violation_D(acc->x) <= cfg.tol_b) {
              state = std::move(next);
              shift_of_x = state.s_k;
              x = std::move(acc->x);
              ++k;
              ++report.accel_steps_taken;
              record(k, Branch::final_accelerated);
            } else {
              report.message = "final acceleration left the tolerance band, kept last iterate";
            }
          }
        }
        break;
      }
      if (k >= cfg.max_outer) {
        report.termination = Termination::max_outer;
        break;
      }

      state.s_k += sp.s - sp.apply_M(x);

      bool use_acceleration = false;
      if (cfg.mode != Mode::sb && k > cfg.warmstart_iters) {
        const Vector grad = smooth_value_grad(sp, state, x).second;
        const OptimalityMeasures meas = compute_beta_phi(grad, sp.delta, x);
        const StepKind decision = switching_test(meas, gs);
        use_acceleration = decision == StepKind::accelerate && !force_standard;
      }
      force_standard = false;

      Branch branch = Branch::standard;
      if (use_acceleration) {
        std::optional<Acceleration> acc;
        try {
          acc = accelerate(sp, state, x, cfg);
        } catch (const LineSearchError&) {
          acc.reset();
          ++report.accel_steps_rejected;
          branch = Branch::rejected;
        }
        if (acc) {
          report.inner.cg_iters += acc->cg_iters;
          ++report.inner.cg_calls;
          report.inner.line_search_trials += acc->trials;
          const SafeguardVerdict verdict = safeguard(sp, x, acc->x, cfg.safeguard);
          if (verdict.accept) {
            x = std::move(acc->x);
            ++report.accel_steps_taken;
            force_standard = verdict.force_standard_next;
            branch = Branch::accelerated;
          } else {
            ++report.accel_steps_rejected;
            branch = Branch::rejected;
          }
        }
      }
      if (branch != Branch::accelerated) x = run_fista(x);
      shift_of_x = state.s_k;
      last = branch;
      record(k + 1, branch);
    }
  } catch (const NumericalError& err) {
    report.termination = Termination::numerical_error;
    report.message = err.what();
  }

  report.outer_iters = k;
  report.x_final = x;
  report.final_shift = shift_of_x;
  report.objective = sp.source.objective(sp.u_block(x));
  report.violation_A = sp.violation_A(x);
  report.violation_D = sp.violation_D(x);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace bregaccel
