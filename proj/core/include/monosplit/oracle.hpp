#pragma once

#include "monosplit/problem.hpp"

#include <optional>

namespace monosplit {

/// Reference solver for 0 in A x + B x + C x. Depends on the operator layer
/// only; it shares no iteration code with the splitting solvers.
struct OracleOptions {
  /// Largest dimension for which faces are enumerated exactly.
  Index max_enumeration_dim = 6;
  long max_iters = 1'000'000;
  /// Iterative route stops once ||x_{k+1} - x_k|| <= step_tol * max(1, ||x_k||).
  double step_tol = 1e-12;
};

enum class OracleRoute { trivial, active_set, iterative };

struct OracleResult {
  Point x;
  OracleRoute route = OracleRoute::iterative;
  long iterations = 0;
  double residual = 0.0;  ///< fixed-point residual at lambda = 1
};

/// Piecewise-linear instances (A zero, affine, box or l1, possibly scaled and
/// shifted; B + C affine) of dimension <= max_enumeration_dim are solved by
/// enumerating faces and solving one linear system per face. Everything else
/// runs a forward-backward-half-forward loop. Throws OracleFailure when
/// neither route produces a solution.
OracleResult oracle_solve_detailed(const ProblemInstance& problem,
                                   const std::optional<Point>& x0 = std::nullopt,
                                   const OracleOptions& options = {});

inline Point oracle_solve(const ProblemInstance& problem,
                          const std::optional<Point>& x0 = std::nullopt,
                          const OracleOptions& options = {}) {
  return oracle_solve_detailed(problem, x0, options).x;
}

}  // namespace monosplit
