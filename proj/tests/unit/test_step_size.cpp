#include "monosplit/step_size.hpp"

#include "monosplit/types.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace monosplit;

TEST(Plan, OverridesLipschitzBinding) {
  const StepSizePlan p = plan_step_size(1.0, 1.0, EpsilonOverrides{0.08, 1.0, 2.5});
  EXPECT_NEAR(p.lambda, 0.99 * 0.02, 1e-15);
  EXPECT_TRUE(violated_constraints(p).empty());
}

TEST(Plan, OverridesWithoutLipschitzPart) {
  const StepSizePlan p = plan_step_size(0.0, 1.0, EpsilonOverrides{0.1, 1.0, 2.6});
  EXPECT_NEAR(p.lambda, 0.099, 1e-15);
}

TEST(Plan, Eps3OutOfRange) {
  try {
    plan_step_size(1.0, 1.0, EpsilonOverrides{0.05, 1.0, 3.5});
    FAIL() << "expected InvalidPlan";
  } catch (const InvalidPlan& e) {
    EXPECT_EQ(e.violated(), PlanConstraint::eps3_range);
    EXPECT_NE(std::string(e.what()).find("eps3 must lie in (2,3)"), std::string::npos);
  }
}

TEST(Plan, EachEpsConstraintNamed) {
  auto violated = [](double e1, double e2, double e3) {
    try {
      plan_step_size(1.0, 1.0, EpsilonOverrides{e1, e2, e3});
    } catch (const InvalidPlan& e) {
      return e.violated();
    }
    ADD_FAILURE() << "no InvalidPlan";
    return PlanConstraint::lambda_positive;
  };
  EXPECT_EQ(violated(0.0, 1.0, 2.5), PlanConstraint::eps1_positive);
  EXPECT_EQ(violated(0.05, -1.0, 2.5), PlanConstraint::eps2_positive);
  EXPECT_EQ(violated(0.05, 2.0, 2.5), PlanConstraint::eps2_below_2beta);
  EXPECT_EQ(violated(0.05, 1.0, 2.0), PlanConstraint::eps3_range);
  EXPECT_EQ(violated(0.2, 1.0, 2.5), PlanConstraint::eps1_eps3_sum);
}

TEST(Plan, AutoSatisfiesAllConstraints) {
  for (double L : {0.0, 0.3, 1.0, 7.0}) {
    for (double beta : {0.01, 0.5, 1.0, 20.0, kUnbounded}) {
      if (L == 0.0 && std::isinf(beta)) continue;
      const StepSizePlan p = plan_step_size(L, beta);
      EXPECT_GT(p.lambda, 0.0);
      EXPECT_TRUE(violated_constraints(p).empty()) << "L=" << L << " beta=" << beta;
    }
  }
}

TEST(Plan, AutoIsDeterministic) {
  const StepSizePlan a = plan_step_size(1.3, 0.7);
  const StepSizePlan b = plan_step_size(1.3, 0.7);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.eps1, b.eps1);
  EXPECT_EQ(a.eps2, b.eps2);
  EXPECT_EQ(a.eps3, b.eps3);
}

TEST(Plan, AutoBeatsEveryGridPoint) {
  const double L = 1.0, beta = 1.0;
  const StepSizePlan best = plan_step_size(L, beta);
  PlannerGrid grid;
  for (double e3 : grid.eps3_values) {
    for (int i = 1; i <= grid.eps1_steps; i += 7) {
      const double e1 = (0.5 - 1.0 / e3) * i / (grid.eps1_steps + 1);
      for (int k = 1; k <= grid.eps2_steps; k += 7) {
        const double e2 = 2.0 * beta * k / (grid.eps2_steps + 1);
        EXPECT_LE(step_bounds(L, beta, e1, e2, e3).admissible_lambda(), best.lambda);
      }
    }
  }
}

TEST(Plan, UnboundedBetaUsesLipschitzBound) {
  const StepSizePlan p = plan_step_size(2.0, kUnbounded);
  // Best possible is 0.99 * (1/2 - 1/2.95) / 2 as eps1 -> 0.
  EXPECT_LT(p.lambda, 0.99 * (0.5 - 1.0 / 2.95) / 2.0);
  EXPECT_GT(p.lambda, 0.95 * 0.99 * (0.5 - 1.0 / 2.95) / 2.0);
}

TEST(Plan, Unconstrained) {
  const StepSizePlan p = plan_step_size(0.0, kUnbounded);
  EXPECT_EQ(p.lambda, 1.0);
  EXPECT_TRUE(p.unconstrained);
  EXPECT_TRUE(violated_constraints(p).empty());
}

TEST(Plan, RejectsBadInputs) {
  EXPECT_THROW(plan_step_size(-1.0, 1.0), InvalidParameter);
  EXPECT_THROW(plan_step_size(1.0, 0.0), InvalidParameter);
  EXPECT_THROW(plan_step_size(kUnbounded, 1.0), InvalidParameter);
}

TEST(Validate, DetectsOversizedLambda) {
  StepSizePlan p = plan_step_size(1.0, 1.0);
  p.lambda *= 2.0;
  EXPECT_FALSE(violated_constraints(p).empty());
  EXPECT_THROW(validate(p), InvalidPlan);
}
