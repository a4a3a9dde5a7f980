#pragma once

#include "monosplit/algorithms.hpp"
#include "monosplit/operators.hpp"
#include "monosplit/problem.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace monosplit {

/// One dual block of the composite inclusion. D_i and C_i enter only through
/// their inverses, which must be single-valued; an absent operator is encoded
/// as the zero inverse.
struct CompositeBlock {
  SetValuedOp b;          ///< B_i on R^{g_i}; needs an inverse resolvent
  SingleValuedOp d_inv;   ///< D_i^{-1}, monotone and nu_i-Lipschitz
  SingleValuedOp c_inv;   ///< C_i^{-1}, mu_i-cocoercive
  Matrix l;               ///< g_i x n, nonzero
  Point r;                ///< in R^{g_i}

  Index dim() const { return b.dim(); }
};

/// find x with
///   z in A x + sum_i L_i^T (B_i # D_i # C_i)(L_i x - r_i) + B x + C x,
/// where # is the parallel sum.
struct CompositeProblem {
  SetValuedOp a;
  SingleValuedOp b;
  SingleValuedOp c;
  Point z;
  std::vector<CompositeBlock> blocks;
  std::optional<Point> known_x;
  std::optional<std::vector<Point>> known_v;

  Index dim() const { return a.dim(); }
  Index lifted_dim() const;

  /// Throws ContractViolation / InvalidParameter for empty block lists,
  /// mismatched shapes, zero L_i, missing constants or a B_i without an
  /// inverse resolvent.
  void validate() const;
};

/// Element of R^n x R^{g_1} x ... x R^{g_m}.
struct LiftedPoint {
  Point x;
  std::vector<Point> v;
};

LiftedPoint zero_lifted(const CompositeProblem& problem);
Point flatten(const LiftedPoint& p);
/// Inverse of flatten for `problem`'s block layout.
LiftedPoint unflatten(const CompositeProblem& problem, const Point& flat);

struct AggregateConstants {
  double lipschitz;     ///< max(L, nu_i) + sqrt(sum ||L_i||^2)
  double cocoercivity;  ///< min(beta, mu_i); kUnbounded when every part is zero
};

AggregateConstants aggregate_constants(const CompositeProblem& problem);

/// (B x + sum L_i^T v_i, -L_i x + D_i^{-1} v_i).
LiftedPoint lifted_apply_q(const CompositeProblem& problem, const LiftedPoint& p);
/// (C x, C_i^{-1} v_i).
LiftedPoint lifted_apply_r(const CompositeProblem& problem, const LiftedPoint& p);
/// (J_{lambda A}(x + lambda z), J_{lambda B_i^{-1}}(v_i - lambda r_i)).
LiftedPoint lifted_resolvent(const CompositeProblem& problem, double lambda, const LiftedPoint& p);

/// The three-operator instance (M, Q, R) on the flattened product space.
/// Q carries L-bar and R carries beta-bar. The known solution, when both
/// primal and dual parts are known, is carried over.
ProblemInstance lift(const CompositeProblem& problem);

struct PrimalDualState {
  LiftedPoint curr;
  LiftedPoint prev;
  long k = 0;
};

PrimalDualState initial_primal_dual_state(const CompositeProblem& problem,
                                          const LiftedPoint& init);

/// One iteration of the primal-dual scheme written out blockwise:
///   x+   = J_A(x + lambda z - lambda(B x + sum L_i^T v_i) - lambda C x)
///          - lambda [(B x + sum L_i^T v_i) - (B x- + sum L_i^T v_i-)]
///   v_i+ = J_{B_i^{-1}}(v_i - lambda r_i - lambda(-L_i x + D_i^{-1} v_i) - lambda C_i^{-1} v_i)
///          - lambda [(-L_i x + D_i^{-1} v_i) - (-L_i x- + D_i^{-1} v_i-)]
/// Does not go through lift().
PrimalDualState primal_dual_step(const PrimalDualState& s, const CompositeProblem& problem,
                                 double lambda);

struct PrimalDualResult {
  Point x;
  std::vector<Point> v;
  IterationTrace trace;
  bool converged = false;
  long iterations = 0;
  StepSizePlan plan;
};

/// Plans lambda from the aggregate constants and runs the outer reflected
/// iteration on the lifted problem.
///
/// With the residual criterion, `stop.tol` is read in check_residuals units
/// (lambda_probe = 1): the lifted residual at the planned lambda is driven
/// below min(lambda, 1) * tol, which bounds every check_residuals value by
/// tol.
PrimalDualResult primal_dual_solve(const CompositeProblem& problem, const StoppingRule& stop,
                                   const LiftedPoint& init);

struct ResidualReport {
  double primal = 0.0;
  std::vector<double> dual;

  double max() const;
};

inline constexpr double kDefaultProbeLambda = 1.0;

/// primal = ||x - J_{mu A}(x + mu(z - sum L_i^T v_i - B x - C x))||,
/// dual_i = ||v_i - J_{mu B_i^{-1}}(v_i + mu(L_i x - r_i - D_i^{-1} v_i - C_i^{-1} v_i))||,
/// with mu = lambda_probe. All vanish exactly at primal-dual solutions.
ResidualReport check_residuals(const CompositeProblem& problem, const Point& x,
                               const std::vector<Point>& v,
                               double lambda_probe = kDefaultProbeLambda);

/// Planted composite instance on R^n with m dual blocks of size 1..n. x* is
/// interior to a box, B is skew, C quadratic; each B_i is an l1
/// subdifferential with some dual coordinates on the boundary of its inverse's
/// domain, D_i^{-1} skew, C_i^{-1} quadratic. z and r_i are set so that
/// (x*, v*) solves both inclusions exactly.
CompositeProblem synthesize_composite(std::uint64_t seed, Index n, Index m);

nlohmann::json composite_to_json(const CompositeProblem& problem);
CompositeProblem composite_from_json(const nlohmann::json& j);

}  // namespace monosplit
