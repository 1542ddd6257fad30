#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bregaccel/model.hpp"
#include "bregaccel/prox_fista.hpp"

namespace bregaccel {

enum class Mode { sbsa, sbsa_lsa, sb };

/// What happens when an accelerated iterate increases ||M x - s||.
///  - strict_reject: discard it and re-solve the subproblem with FISTA.
///  - heuristic_accept: keep it, but force the next iteration onto FISTA.
enum class Safeguard { heuristic_accept, strict_reject };

enum class Termination { converged, max_outer, numerical_error };

enum class Branch {
  initial,         // x^1 from H^0
  standard,        // FISTA on H^k
  accelerated,     // CG on the face + line search, accepted
  rejected,        // acceleration discarded, FISTA instead
  final_accelerated,  // forced last step in sbsa_lsa mode
};

const char* to_string(Mode mode);
const char* to_string(Safeguard safeguard);
const char* to_string(Termination termination);
const char* to_string(Branch branch);
std::optional<Mode> parse_mode(const std::string& name);
std::optional<Safeguard> parse_safeguard(const std::string& name);

struct SolverConfig {
  double lambda = 1.0;
  double tol_b = 1e-4;
  int max_outer = 10000;
  int warmstart_iters = 5;
  double eta = 0.1;
  double gamma0 = 10.0;
  FistaConfig fista;
  double tol_cg = 1e-2;
  Mode mode = Mode::sbsa;
  Safeguard safeguard = Safeguard::heuristic_accept;
  bool record_trace = true;

  /// Throws InvalidProblemError naming the offending field.
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double violation_A = 0.0;
  double violation_D = 0.0;
  /// ||M x^k - s||.
  double violation = 0.0;
  /// H^{k-1}(x^k), the objective of the subproblem that produced x^k.
  double subproblem_value = 0.0;
  double gamma = 0.0;
  Branch branch = Branch::initial;
};

struct InnerCounts {
  long fista_iters = 0;
  int fista_calls = 0;
  long cg_iters = 0;
  int cg_calls = 0;
  long line_search_trials = 0;
};

struct SolveReport {
  std::string solver;
  Vector x_final;
  /// Right-hand side s of the subproblem whose approximate minimizer is x_final.
  Vector final_shift;
  double lambda = 1.0;
  int outer_iters = 0;
  int accel_steps_taken = 0;
  int accel_steps_rejected = 0;
  InnerCounts inner;
  Termination termination = Termination::max_outer;
  double wall_time = 0.0;
  std::vector<IterationRecord> trace;
  std::string message;

  double objective = 0.0;
  double violation_A = 0.0;
  double violation_D = 0.0;
};

struct SafeguardVerdict {
  bool accept = true;
  bool force_standard_next = false;
};

SafeguardVerdict safeguard(const StackedProblem& sp, const Vector& x_prev, const Vector& x_candidate,
                           Safeguard policy);

/// Split Bregman outer loop in the selected mode.
SolveReport solve(const StackedProblem& sp, const SolverConfig& cfg);

}  // namespace bregaccel
