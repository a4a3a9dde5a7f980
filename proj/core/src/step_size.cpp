#include "monosplit/step_size.hpp"

#include "monosplit/types.hpp"

#include <algorithm>
#include <cmath>

namespace monosplit {

std::string_view describe(PlanConstraint c) {
  switch (c) {
    case PlanConstraint::eps1_positive: return "eps1 must be positive";
    case PlanConstraint::eps2_positive: return "eps2 must be positive";
    case PlanConstraint::eps2_below_2beta: return "eps2 must be below 2*beta";
    case PlanConstraint::eps3_range: return "eps3 must lie in (2,3)";
    case PlanConstraint::eps1_eps3_sum: return "eps1 + 1/eps3 must be below 1/2";
    case PlanConstraint::lambda_positive: return "lambda must be positive";
    case PlanConstraint::cocoercive_bound: return "lambda must be below (2*beta - eps2)*eps1";
    case PlanConstraint::eps2_bound: return "lambda must not exceed (3 - eps3)*eps2";
    case PlanConstraint::lipschitz_bound:
      return "lambda must be below (1/2 - eps1 - 1/eps3)/L";
  }
  return "unknown constraint";
}

InvalidPlan::InvalidPlan(PlanConstraint violated, const std::string& detail)
    : InvalidParameter("invalid step-size plan: " + std::string(describe(violated)) +
                       (detail.empty() ? "" : " (" + detail + ")")),
      violated_(violated) {}

std::vector<double> PlannerGrid::default_eps3_values() {
  std::vector<double> v;
  for (int i = 1; i <= 19; ++i) v.push_back(2.0 + 0.05 * i);
  return v;
}

double StepBounds::admissible_lambda() const {
  return std::min({kStrictBoundFactor * cocoercive, eps2, kStrictBoundFactor * lipschitz});
}

StepBounds step_bounds(double lipschitz, double cocoercivity, double eps1, double eps2,
                       double eps3) {
  StepBounds b{};
  b.cocoercive = std::isinf(cocoercivity) ? kUnbounded : (2.0 * cocoercivity - eps2) * eps1;
  b.eps2 = (3.0 - eps3) * eps2;
  b.lipschitz = lipschitz == 0.0 ? kUnbounded : (0.5 - eps1 - 1.0 / eps3) / lipschitz;
  return b;
}

namespace {

void check_inputs(double lipschitz, double cocoercivity) {
  if (!(lipschitz >= 0.0) || std::isinf(lipschitz)) {
    throw InvalidParameter("step-size planning: L must be finite and nonnegative");
  }
  if (!(cocoercivity > 0.0)) {
    throw InvalidParameter("step-size planning: beta must be positive (or the unbounded sentinel)");
  }
}

std::optional<PlanConstraint> first_eps_violation(double beta, double e1, double e2, double e3) {
  if (!(e1 > 0.0)) return PlanConstraint::eps1_positive;
  if (!(e2 > 0.0)) return PlanConstraint::eps2_positive;
  if (!(e2 < 2.0 * beta)) return PlanConstraint::eps2_below_2beta;
  if (!(e3 > 2.0 && e3 < 3.0)) return PlanConstraint::eps3_range;
  if (!(e1 + 1.0 / e3 < 0.5)) return PlanConstraint::eps1_eps3_sum;
  return std::nullopt;
}

StepSizePlan make_plan(double L, double beta, double e1, double e2, double e3) {
  StepSizePlan p;
  p.lambda = step_bounds(L, beta, e1, e2, e3).admissible_lambda();
  p.eps1 = e1;
  p.eps2 = e2;
  p.eps3 = e3;
  p.lipschitz = L;
  p.cocoercivity = beta;
  return p;
}

}  // namespace

StepSizePlan plan_step_size(double lipschitz, double cocoercivity,
                            std::optional<EpsilonOverrides> overrides, const PlannerGrid& grid) {
  check_inputs(lipschitz, cocoercivity);
  const double L = lipschitz;
  const double beta = cocoercivity;

  if (overrides) {
    const auto [e1, e2, e3] = *overrides;
    if (auto v = first_eps_violation(beta, e1, e2, e3)) {
      throw InvalidPlan(*v, "eps1=" + std::to_string(e1) + ", eps2=" + std::to_string(e2) +
                                ", eps3=" + std::to_string(e3));
    }
    return make_plan(L, beta, e1, e2, e3);
  }

  if (L == 0.0 && std::isinf(beta)) {
    // Nothing binds. eps2 is chosen so that the "<=" bound admits lambda = 1.
    StepSizePlan p = make_plan(L, beta, 0.05, 2.0, 2.5);
    p.lambda = 1.0;
    p.unconstrained = true;
    return p;
  }

  if (grid.eps3_values.empty() || grid.eps1_steps < 1 || grid.eps2_steps < 1) {
    throw InvalidParameter("step-size planning: empty search grid");
  }

  std::optional<StepSizePlan> best;
  for (double e3 : grid.eps3_values) {
    if (!(e3 > 2.0 && e3 < 3.0)) throw InvalidParameter("planner grid: eps3 outside (2,3)");
    const double e1_max = 0.5 - 1.0 / e3;
    for (int i = 1; i <= grid.eps1_steps; ++i) {
      const double e1 = e1_max * i / (grid.eps1_steps + 1);
      if (std::isinf(beta)) {
        // Only the "<=" bound involves eps2; pick it so that bound equals the
        // Lipschitz one.
        const double target = kStrictBoundFactor * (0.5 - e1 - 1.0 / e3) / L;
        const StepSizePlan p = make_plan(L, beta, e1, target / (3.0 - e3), e3);
        if (!best || p.lambda > best->lambda) best = p;
        continue;
      }
      for (int k = 1; k <= grid.eps2_steps; ++k) {
        const double e2 = 2.0 * beta * k / (grid.eps2_steps + 1);
        const StepSizePlan p = make_plan(L, beta, e1, e2, e3);
        if (!best || p.lambda > best->lambda) best = p;
      }
    }
  }
  validate(*best);
  return *best;
}

std::vector<PlanConstraint> violated_constraints(const StepSizePlan& p) {
  std::vector<PlanConstraint> out;
  if (!(p.eps1 > 0.0)) out.push_back(PlanConstraint::eps1_positive);
  if (!(p.eps2 > 0.0)) out.push_back(PlanConstraint::eps2_positive);
  if (!(p.eps2 < 2.0 * p.cocoercivity)) out.push_back(PlanConstraint::eps2_below_2beta);
  if (!(p.eps3 > 2.0 && p.eps3 < 3.0)) out.push_back(PlanConstraint::eps3_range);
  if (!(p.eps1 + 1.0 / p.eps3 < 0.5)) out.push_back(PlanConstraint::eps1_eps3_sum);
  if (!(p.lambda > 0.0)) out.push_back(PlanConstraint::lambda_positive);
  const StepBounds b = step_bounds(p.lipschitz, p.cocoercivity, p.eps1, p.eps2, p.eps3);
  if (!std::isinf(p.cocoercivity) && !(p.lambda < b.cocoercive)) {
    out.push_back(PlanConstraint::cocoercive_bound);
  }
  if (!(p.lambda <= b.eps2)) out.push_back(PlanConstraint::eps2_bound);
  if (p.lipschitz != 0.0 && !(p.lambda < b.lipschitz)) {
    out.push_back(PlanConstraint::lipschitz_bound);
  }
  return out;
}

void validate(const StepSizePlan& plan) {
  const auto v = violated_constraints(plan);
  if (!v.empty()) throw InvalidPlan(v.front(), "lambda=" + std::to_string(plan.lambda));
}

}  // namespace monosplit
