#pragma once

#include "monosplit/errors.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monosplit {

/// The inequalities a step-size plan for the outer reflected iteration must
/// satisfy.
enum class PlanConstraint {
  eps1_positive,     // eps1 > 0
  eps2_positive,     // eps2 > 0
  eps2_below_2beta,  // eps2 < 2 beta
  eps3_range,        // 2 < eps3 < 3
  eps1_eps3_sum,     // eps1 + 1/eps3 < 1/2
  lambda_positive,   // lambda > 0
  cocoercive_bound,  // lambda < (2 beta - eps2) eps1      (skipped for beta = inf)
  eps2_bound,        // lambda <= (3 - eps3) eps2
  lipschitz_bound,   // lambda < (1/2 - eps1 - 1/eps3) / L (skipped for L = 0)
};

std::string_view describe(PlanConstraint c);

class InvalidPlan : public InvalidParameter {
 public:
  InvalidPlan(PlanConstraint violated, const std::string& detail);
  PlanConstraint violated() const { return violated_; }

 private:
  PlanConstraint violated_;
};

struct StepSizePlan {
  double lambda = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  double lipschitz = 0.0;     ///< L of the monotone Lipschitz part
  double cocoercivity = 0.0;  ///< beta of the cocoercive part, may be kUnbounded
  /// L = 0 and beta = inf: no bound binds and lambda fell back to 1.
  bool unconstrained = false;
};

struct EpsilonOverrides {
  double eps1;
  double eps2;
  double eps3;
};

/// Auto-planner search grid. eps1 and eps2 are sampled at interior points of
/// (0, 1/2 - 1/eps3) and (0, 2 beta).
struct PlannerGrid {
  std::vector<double> eps3_values = default_eps3_values();
  int eps1_steps = 50;
  int eps2_steps = 50;

  static std::vector<double> default_eps3_values();
};

/// Safety factor applied to the strict upper bounds.
inline constexpr double kStrictBoundFactor = 0.99;

/// Upper bounds on lambda for fixed (eps1, eps2, eps3). Skipped bounds are
/// kUnbounded.
struct StepBounds {
  double cocoercive;
  double eps2;
  double lipschitz;

  /// 0.99 x the strict bounds, the "<=" bound as is.
  double admissible_lambda() const;
};

StepBounds step_bounds(double lipschitz, double cocoercivity, double eps1, double eps2,
                       double eps3);

/// Plans lambda for the outer reflected iteration.
///
/// With overrides, validates the eps constraints (throwing InvalidPlan naming
/// the first violated one) and returns the admissible lambda. Without,
/// grid-searches eps to maximize lambda. L = 0 together with beta = inf yields
/// lambda = 1 and `unconstrained` set.
StepSizePlan plan_step_size(double lipschitz, double cocoercivity,
                            std::optional<EpsilonOverrides> overrides = std::nullopt,
                            const PlannerGrid& grid = {});

/// Every constraint `plan` violates, in declaration order.
std::vector<PlanConstraint> violated_constraints(const StepSizePlan& plan);

/// Throws InvalidPlan for the first violated constraint.
void validate(const StepSizePlan& plan);

}  // namespace monosplit
