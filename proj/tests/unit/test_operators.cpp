#include "helpers.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"
#include "monosplit/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace monosplit;
using monosplit::testing::mat2;
using monosplit::testing::pt;

TEST(Apply, ZeroMap) {
  EXPECT_EQ(make_zero_map(2).apply(pt({3, -1})), pt({0, 0}));
}

TEST(Apply, IdentityFactorOne) {
  EXPECT_EQ(make_scaled_identity(1, 1.0).apply(pt({2})), pt({2}));
}

TEST(Apply, SkewRotation) {
  EXPECT_EQ(make_skew(mat2(0, 1, -1, 0)).apply(pt({1, 0})), pt({0, -1}));
}

TEST(Apply, RejectsDimensionMismatch) {
  EXPECT_THROW(make_zero_map(2).apply(pt({1, 2, 3})), ContractViolation);
}

TEST(Apply, RejectsNonFiniteOutput) {
  auto op = make_scaled_identity(1, 1e308);
  EXPECT_THROW(op.apply(pt({1e10})), NumericError);
}

TEST(Resolvent, ZeroIsIdentity) {
  EXPECT_EQ(make_zero_set_valued(2).resolvent(3.0, pt({5, 5})), pt({5, 5}));
}

TEST(Resolvent, BoxProjection) {
  auto box = make_box_normal_cone(pt({0, 0}), pt({1, 1}));
  EXPECT_EQ(box.resolvent(0.7, pt({2, -3})), pt({1, 0}));
}

TEST(Resolvent, AffineSkewLinearSolve) {
  auto a = make_affine_monotone(mat2(0, 1, -1, 0), pt({0, 0}));
  const Point r = a.resolvent(1.0, pt({1, 0}));
  EXPECT_NEAR(r[0], 0.5, 1e-15);
  EXPECT_NEAR(r[1], 0.5, 1e-15);
}

TEST(Resolvent, AffineWithOffset) {
  // (I + lambda M) p = x - lambda b with M = 2, b = 1, lambda = 0.5: 2p = 3 - 0.5.
  auto a = make_affine_monotone(Matrix::Constant(1, 1, 2.0), pt({1}));
  EXPECT_NEAR(a.resolvent(0.5, pt({3}))[0], 1.25, 1e-15);
}

TEST(Resolvent, RejectsNonPositiveLambda) {
  auto box = make_box_normal_cone(pt({0}), pt({1}));
  EXPECT_THROW(box.resolvent(0.0, pt({2})), InvalidParameter);
  EXPECT_THROW(box.resolvent(-1.0, pt({2})), InvalidParameter);
}

TEST(Resolvent, RejectsNonFiniteInput) {
  auto box = make_box_normal_cone(pt({0}), pt({1}));
  EXPECT_THROW(box.resolvent(1.0, pt({std::numeric_limits<double>::quiet_NaN()})), NumericError);
}

TEST(Resolvent, BallProjection) {
  auto ball = make_ball_normal_cone(pt({1, 0}), 1.0);
  const Point r = ball.resolvent(2.0, pt({4, 4}));
  EXPECT_NEAR(r[0], 1.0 + 0.6, 1e-15);
  EXPECT_NEAR(r[1], 0.8, 1e-15);
  EXPECT_EQ(ball.resolvent(2.0, pt({1.5, 0.1})), pt({1.5, 0.1}));
}

TEST(InverseResolvent, IdentityOperator) {
  auto a = make_affine_monotone(Matrix::Identity(1, 1), pt({0}));
  EXPECT_NEAR(a.inverse_resolvent(1.0, pt({2}))[0], 1.0, 1e-15);
}

TEST(InverseResolvent, ZeroFamilyRejected) {
  EXPECT_THROW(make_zero_set_valued(2).inverse_resolvent(1.0, pt({1, 1})), InvalidParameter);
}

// A(y) = 2y, lambda = 0.5, x = 3. Brute force: find p with x - p = 0.5 A^{-1}(p)
// = p / 4, by bisection on the monotone scalar equation.
TEST(InverseResolvent, ScalarAgainstBisection) {
  auto a = make_affine_monotone(Matrix::Constant(1, 1, 2.0), pt({0}));
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (3.0 - mid - 0.5 * (mid / 2.0) > 0.0 ? lo : hi) = mid;
  }
  const double expected = 0.5 * (lo + hi);
  EXPECT_NEAR(expected, 2.4, 1e-12);
  EXPECT_NEAR(a.inverse_resolvent(0.5, pt({3}))[0], expected, 1e-12);
}

TEST(InverseResolvent, ClosedFormsMatchMoreauIdentity) {
  const Point x = pt({2.5, -0.3, 0.9});
  const double lambda = 0.7;
  const SetValuedOp ops[] = {
      make_l1_subdifferential(3, 1.3),
      make_box_normal_cone(pt({-1, 0, 0.5}), pt({1, 0, 2})),
      make_ball_normal_cone(pt({0.2, 0.1, -0.4}), 0.8),
      make_affine_monotone(Matrix::Identity(3, 3) * 0.5 + Matrix::Ones(3, 3) * 0.1, pt({1, 0, -1})),
      make_scaled(make_l1_subdifferential(3, 0.4), 2.0, pt({0.1, -0.2, 0.3})),
  };
  for (const auto& op : ops) {
    const Point closed = op.inverse_resolvent(lambda, x);
    const Point moreau = x - lambda * op.resolvent(1.0 / lambda, x / lambda);
    EXPECT_LT((closed - moreau).norm(), 1e-12) << to_string(op.kind());
  }
}

TEST(Certify, SkewRotationPasses) {
  const CertReport r = certify(make_skew(mat2(0, 1, -1, 0)), 1000, 7);
  EXPECT_TRUE(r.monotone.passed);
  ASSERT_TRUE(r.lipschitz.has_value());
  EXPECT_TRUE(r.lipschitz->passed);
  EXPECT_FALSE(r.cocoercive.has_value());
  EXPECT_TRUE(r.passed());
}

TEST(Certify, IdentityIsOneCocoercive) {
  auto op = make_scaled_identity(3, 1.0).with_constants(1.0, 1.0);
  EXPECT_TRUE(certify(op, 1000, 3).passed());
}

TEST(Certify, DoubledIdentityIsNotOneCocoercive) {
  auto op = make_scaled_identity(3, 2.0).with_constants(std::nullopt, 1.0);
  const CertReport r = certify(op, 1000, 3);
  ASSERT_TRUE(r.cocoercive.has_value());
  EXPECT_FALSE(r.cocoercive->passed);
  EXPECT_FALSE(r.passed());
}

TEST(Certify, OverstatedLipschitzFails) {
  auto op = make_skew(Matrix(mat2(0, 3, -3, 0))).with_constants(2.0, std::nullopt);
  EXPECT_FALSE(certify(op, 200, 1).passed());
}

TEST(Certify, NonMonotoneFails) {
  auto op = make_scaled_identity(2, 1.0).with_constants(1.0, std::nullopt);
  auto neg = make_linear(-Matrix::Identity(2, 2));
  EXPECT_TRUE(certify(op, 100, 1).passed());
  EXPECT_FALSE(certify(neg, 100, 1).monotone.passed);
}

TEST(Probes, FirmNonexpansiveAcrossFamilies) {
  const SetValuedOp ops[] = {
      make_zero_set_valued(3),
      make_box_normal_cone(pt({-1, -1, 0}), pt({1, 2, 0})),
      make_ball_normal_cone(pt({0, 1, 0}), 1.5),
      make_l1_subdifferential(3, 0.7),
      make_affine_monotone(Matrix::Identity(3, 3) * 2.0, pt({0, 1, 2})),
      make_scaled(make_box_normal_cone(pt({0, 0, 0}), pt({1, 1, 1})), 3.0, pt({1, 1, 1})),
  };
  for (double lambda : {0.1, 1.0, 5.0}) {
    for (const auto& op : ops) {
      EXPECT_TRUE(probe_firm_nonexpansive(op, lambda, 300, 11).passed) << to_string(op.kind());
    }
  }
}

TEST(Probes, InverseResolventIdentity) {
  const SetValuedOp ops[] = {
      make_box_normal_cone(pt({-1, -1}), pt({1, 2})),
      make_ball_normal_cone(pt({0, 1}), 1.5),
      make_l1_subdifferential(2, 0.7),
      make_affine_monotone(mat2(1, 2, -2, 0.5), pt({0, 1})),
  };
  for (const auto& op : ops) {
    EXPECT_TRUE(probe_inverse_resolvent_identity(op, 0.8, 300, 5).passed) << to_string(op.kind());
  }
}

TEST(Linalg, SpectralNorm) {
  EXPECT_NEAR(linalg::spectral_norm(mat2(0, 1, -1, 0)), 1.0, 1e-9);
  EXPECT_NEAR(linalg::spectral_norm(mat2(0, 3, -3, 0)), 3.0, 1e-9);
  EXPECT_EQ(linalg::spectral_norm(Matrix::Zero(2, 2)), 0.0);
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const double svd = Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
  EXPECT_NEAR(linalg::spectral_norm(m), svd, 1e-9 * svd);
}
