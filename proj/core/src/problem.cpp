#include "monosplit/problem.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"
#include "sampling.hpp"

#include <array>
#include <cmath>
#include <string>

namespace monosplit {

double ProblemInstance::lipschitz() const {
  if (b.kind() == SingleValuedKind::zero) return 0.0;
  return b.effective_lipschitz();
}

double ProblemInstance::cocoercivity() const {
  if (c.kind() == SingleValuedKind::zero) return kUnbounded;
  return c.cocoercivity().value_or(0.0);
}

void ProblemInstance::validate() const {
  require_dim(a.dim(), b.dim(), "problem: B");
  require_dim(a.dim(), c.dim(), "problem: C");
  if (known_solution) require_dim(a.dim(), known_solution->size(), "problem: known solution");
  if (!std::isfinite(lipschitz())) {
    throw InvalidParameter("problem: B needs a declared Lipschitz constant");
  }
  if (!(cocoercivity() > 0.0)) {
    throw InvalidParameter("problem: C needs a declared cocoercivity modulus");
  }
}

double fixed_point_residual(const ProblemInstance& problem, const Point& x, double lambda) {
  const Point fwd = x - lambda * problem.b.apply(x) - lambda * problem.c.apply(x);
  return (x - problem.a.resolvent(lambda, fwd)).norm();
}

namespace {

constexpr std::array kRecipes{Recipe::affine_interior, Recipe::l1_lasso_like,
                              Recipe::ball_boundary};

ProblemInstance affine_interior(detail::Sampler& rng, Index n) {
  // Box [lo, hi] with |lo|, |hi| >= 1 and x* in [-1/2, 1/2]^n: strictly
  // interior, so A x* = {0}.
  Point lo(n), hi(n);
  for (Index i = 0; i < n; ++i) {
    lo[i] = -1.0 - rng.uniform(0.0, 1.0);
    hi[i] = 1.0 + rng.uniform(0.0, 1.0);
  }
  const Point x_star = rng.uniform_point(n, -0.5, 0.5);
  const Matrix skew = rng.skew(n, rng.uniform(0.5, 2.0));
  const Matrix q = rng.spd(n, rng.uniform(0.1, 1.0));
  const Point shift = -(skew * x_star) - q * x_star;
  return {make_box_normal_cone(lo, hi), make_skew(skew), make_quadratic_gradient(q, shift),
          x_star};
}

ProblemInstance l1_lasso_like(detail::Sampler& rng, Index n) {
  const double w = rng.uniform(0.5, 2.0);
  Point x_star = rng.uniform_point(n, -1.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    if (rng.bernoulli(0.4)) x_star[i] = 0.0;
  }
  const Matrix q = rng.spd(n, rng.uniform(0.1, 1.0));
  // Required value of C x*: -w sign(x*_i) on the support, strictly inside
  // (-w, w) off it.
  Point target(n);
  for (Index i = 0; i < n; ++i) {
    const double s = rng.uniform(-0.5 * w, 0.5 * w);
    target[i] = x_star[i] > 0.0 ? -w : (x_star[i] < 0.0 ? w : s);
  }
  const Point shift = target - q * x_star;
  return {make_l1_subdifferential(n, w), make_zero_map(n), make_quadratic_gradient(q, shift),
          x_star};
}

ProblemInstance ball_boundary(detail::Sampler& rng, Index n) {
  const Point center = 0.3 * rng.gaussian_point(n);
  const double radius = rng.uniform(0.5, 1.5);
  const Point dir = rng.direction(n);
  const Point x_star = center + radius * dir;
  const double normal = rng.uniform(0.2, 1.0);
  const Matrix skew = rng.skew(n, rng.uniform(0.5, 2.0));
  const double scale = rng.uniform(0.5, 2.0);
  // -B x* - C x* = normal * dir, an outward normal at x*.
  const Point shift =
      -(skew * x_star) - scale * x_star.array().tanh().matrix() - normal * dir;
  return {make_ball_normal_cone(center, radius), make_skew(skew),
          make_componentwise_tanh(scale, shift), x_star};
}

}  // namespace

std::string_view to_string(Recipe recipe) {
  switch (recipe) {
    case Recipe::affine_interior: return "affine-interior";
    case Recipe::l1_lasso_like: return "l1-lasso-like";
    case Recipe::ball_boundary: return "ball-boundary";
  }
  return "unknown";
}

Recipe parse_recipe(std::string_view name) {
  for (Recipe r : kRecipes) {
    if (to_string(r) == name) return r;
  }
  throw InvalidParameter("unknown instance recipe '" + std::string(name) + "'");
}

std::span<const Recipe> all_recipes() { return kRecipes; }

ProblemInstance synthesize_instance(std::uint64_t seed, Index dim, Recipe recipe) {
  if (dim < 1) throw InvalidParameter("synthesize_instance: dim must be >= 1");
  detail::Sampler rng(seed);
  switch (recipe) {
    case Recipe::affine_interior: return affine_interior(rng, dim);
    case Recipe::l1_lasso_like: return l1_lasso_like(rng, dim);
    case Recipe::ball_boundary: return ball_boundary(rng, dim);
  }
  throw InvalidParameter("synthesize_instance: unknown recipe");
}

}  // namespace monosplit
