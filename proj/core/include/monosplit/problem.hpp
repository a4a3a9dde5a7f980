#pragma once

#include "monosplit/operators.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace monosplit {

/// find x with 0 in A x + B x + C x.
///
/// B is monotone and Lipschitz, C is cocoercive (the zero map carries the
/// unbounded modulus). B = 0 and/or C = 0 give the two- and one-operator
/// special cases.
struct ProblemInstance {
  SetValuedOp a;
  SingleValuedOp b;
  SingleValuedOp c;
  std::optional<Point> known_solution;

  Index dim() const { return a.dim(); }

  /// Lipschitz constant of B used for step-size planning (0 for B = 0).
  double lipschitz() const;
  /// Cocoercivity modulus of C used for step-size planning (kUnbounded for
  /// constant C).
  double cocoercivity() const;

  /// Checks shared dimensions and that B and C carry the constants the
  /// solvers need. Throws ContractViolation / InvalidParameter.
  void validate() const;
};

/// ||x - J_{lambda A}(x - lambda B x - lambda C x)||; zero exactly at solutions.
double fixed_point_residual(const ProblemInstance& problem, const Point& x, double lambda = 1.0);

inline constexpr double kPlantedResidualTol = 1e-8;

enum class Recipe {
  /// Box normal cone with the solution strictly inside, skew B, quadratic C.
  affine_interior,
  /// l1 subdifferential, B = 0, quadratic C; sparse planted solution.
  l1_lasso_like,
  /// Ball normal cone with the solution on the sphere, skew B, tanh C.
  ball_boundary,
};

std::string_view to_string(Recipe recipe);
/// Throws InvalidParameter for an unknown recipe name.
Recipe parse_recipe(std::string_view name);
std::span<const Recipe> all_recipes();

/// Builds (A, B, C) with a planted solution x*: operators are drawn first and
/// the constant term of C is shifted so that -B x* - C x* lies in A x*.
/// Deterministic in `seed`.
ProblemInstance synthesize_instance(std::uint64_t seed, Index dim, Recipe recipe);

}  // namespace monosplit
