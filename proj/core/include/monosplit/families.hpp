#pragma once

// Closed-form operator families. Every constructor attaches the analytically
// correct constants so the result passes `certify` as built.

#include "monosplit/operators.hpp"

namespace monosplit {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kMonotoneEigTol = 1e-10;

// Set-valued (maximally monotone) families.

SetValuedOp make_zero_set_valued(Index dim);

/// A(y) = M y + b. Rejects M whose symmetric part has an eigenvalue below
/// -1e-10. Resolvent factorizations are cached per lambda.
SetValuedOp make_affine_monotone(Matrix m, Point b);

/// Normal cone of the box [lo, hi]; its resolvent is the componentwise clamp.
SetValuedOp make_box_normal_cone(Point lo, Point hi);

/// Normal cone of the closed Euclidean ball B(center, radius).
SetValuedOp make_ball_normal_cone(Point center, double radius);

/// weight * subdifferential of ||.||_1; resolvent is soft-thresholding.
SetValuedOp make_l1_subdifferential(Index dim, double weight);

/// y -> scale * inner(y) + shift, scale > 0.
SetValuedOp make_scaled(SetValuedOp inner, double scale, Point shift);

// Single-valued families.

SingleValuedOp make_zero_map(Index dim);

/// x -> M x. Lipschitz = ||M||; cocoercivity 1/lambda_max when M is
/// symmetric positive semidefinite and nonzero.
SingleValuedOp make_linear(Matrix m);

/// x -> M x + b, constants as for make_linear.
SingleValuedOp make_affine(Matrix m, Point b);

/// x -> M x with M + M^T = 0. Monotone, Lipschitz ||M||, never cocoercive
/// unless M = 0.
SingleValuedOp make_skew(Matrix m);

/// Gradient of 1/2 x^T Q x + b^T x. Cocoercivity 1/lambda_max(Q); Q = 0 gives
/// the constant map b with the unbounded sentinel.
SingleValuedOp make_quadratic_gradient(Matrix q, Point b);

/// x -> factor * x, factor >= 0.
SingleValuedOp make_scaled_identity(Index dim, double factor);

/// x_i -> scale * tanh(x_i) + b_i. Gradient of a convex function with
/// scale-Lipschitz gradient, hence 1/scale cocoercive.
SingleValuedOp make_componentwise_tanh(double scale, Point b);

}  // namespace monosplit
