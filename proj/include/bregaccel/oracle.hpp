#pragma once

#include <vector>

#include "bregaccel/model.hpp"

namespace bregaccel {

/// Exhaustive reference solver for desk-sized instances (n + q <= 12).
///
/// Every sign pattern sigma in {-1, 0, +1}^(n+q) of x = [u; Du] fixes a face. On that face the
/// objective is the smooth quadratic u'Cu + <tau1 sigma_u, u> + <tau2 sigma_d, D u>, minimized
/// under A u = b and the zero constraints. The optimum is the lowest face minimizer that
/// lies in its own closed orthant face.
struct OracleSolution {
  Vector u;
  double objective = 0.0;
  /// Pattern of the winning face, entries in {-1, 0, 1}.
  std::vector<int> pattern;
  long patterns_examined = 0;
  long patterns_consistent = 0;
};

inline constexpr Index kOracleMaxVariables = 12;

/// Throws InvalidProblemError beyond kOracleMaxVariables, InfeasibleError when no face admits
/// a point with A u = b.
OracleSolution enumerate_solve(const ConstrainedL1Problem& problem);

}  // namespace bregaccel
