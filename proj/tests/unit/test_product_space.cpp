#include "helpers.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"
#include "monosplit/product_space.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace monosplit;
using monosplit::testing::mat2;
using monosplit::testing::pt;

namespace {

CompositeBlock zero_block(Index g, Matrix l) {
  return CompositeBlock{make_box_normal_cone(Point::Zero(g), Point::Zero(g)), make_zero_map(g),
                        make_zero_map(g), std::move(l), Point::Zero(g)};
}

CompositeProblem zero_composite(Index n, Index g) {
  return CompositeProblem{make_zero_set_valued(n), make_zero_map(n), make_zero_map(n),
                          Point::Zero(n), {zero_block(g, Matrix::Identity(g, n))},
                          std::nullopt, std::nullopt};
}

}  // namespace

TEST(AggregateConstants, LipschitzOneBlock) {
  CompositeProblem p = zero_composite(2, 2);
  p.b = make_skew(mat2(0, 1, -1, 0));
  p.blocks[0].d_inv = make_skew(mat2(0, 2, -2, 0));
  p.blocks[0].l = Matrix::Identity(2, 2) * 3.0;
  EXPECT_NEAR(aggregate_constants(p).lipschitz, 5.0, 1e-9);
}

TEST(AggregateConstants, CocoercivityMinimum) {
  CompositeProblem p = zero_composite(1, 1);
  p.c = make_quadratic_gradient(Matrix::Identity(1, 1), pt({0}));
  p.blocks[0].c_inv = make_quadratic_gradient(Matrix::Identity(1, 1) * 2.0, pt({0}));
  EXPECT_NEAR(aggregate_constants(p).cocoercivity, 0.5, 1e-15);
}

TEST(AggregateConstants, TwoIdentityCouplings) {
  CompositeProblem p = zero_composite(2, 2);
  p.blocks[0].d_inv = make_scaled_identity(2, 1.0).with_constants(1.0, 1.0);
  CompositeBlock second = zero_block(2, Matrix::Identity(2, 2));
  second.d_inv = make_scaled_identity(2, 1.0).with_constants(1.0, 1.0);
  p.blocks.push_back(second);
  const AggregateConstants k = aggregate_constants(p);
  EXPECT_NEAR(k.lipschitz, 1.0 + std::sqrt(2.0), 1e-9);
  EXPECT_TRUE(std::isinf(k.cocoercivity));
}

TEST(LiftedQ, ZeroAtOrigin) {
  const CompositeProblem p = synthesize_composite(1, 3, 2);
  const LiftedPoint q = lifted_apply_q(p, zero_lifted(p));
  EXPECT_EQ(flatten(q), Point::Zero(p.lifted_dim()));
}

TEST(LiftedQ, SkewCoupling) {
  const CompositeProblem p = zero_composite(2, 2);
  const LiftedPoint q = lifted_apply_q(p, LiftedPoint{pt({1, 0}), {pt({0, 1})}});
  EXPECT_EQ(q.x, pt({0, 1}));
  EXPECT_EQ(q.v[0], pt({-1, 0}));
}

TEST(LiftedQ, RejectsMismatchedBlocks) {
  const CompositeProblem p = zero_composite(2, 2);
  EXPECT_THROW(lifted_apply_q(p, LiftedPoint{pt({1, 0}), {}}), ContractViolation);
  EXPECT_THROW(lifted_apply_q(p, LiftedPoint{pt({1, 0}), {pt({1})}}), ContractViolation);
}

TEST(LiftedR, Blockwise) {
  CompositeProblem p = zero_composite(1, 1);
  EXPECT_EQ(flatten(lifted_apply_r(p, LiftedPoint{pt({1}), {pt({2})}})), pt({0, 0}));
  p.c = make_scaled_identity(1, 1.0).with_constants(1.0, 1.0);
  p.blocks[0].c_inv = make_scaled_identity(1, 1.0).with_constants(1.0, 1.0);
  EXPECT_EQ(flatten(lifted_apply_r(p, LiftedPoint{pt({1}), {pt({2})}})), pt({1, 2}));
}

TEST(LiftedResolvent, ZeroCompatibleIsIdentity) {
  const CompositeProblem p = zero_composite(2, 2);
  const LiftedPoint x{pt({3, -1}), {pt({0.5, 2})}};
  EXPECT_EQ(flatten(lifted_resolvent(p, 0.7, x)), flatten(x));
}

TEST(LiftedResolvent, PrimalShift) {
  CompositeProblem p = zero_composite(1, 1);
  p.z = pt({1});
  EXPECT_EQ(lifted_resolvent(p, 2.0, LiftedPoint{pt({5}), {pt({0})}}).x, pt({7}));
}

TEST(Lift, DeclaredConstantsCertify) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const CompositeProblem c = synthesize_composite(seed, 4, 2);
    const ProblemInstance p = lift(c);
    EXPECT_TRUE(certify(p.b, 1000, seed).passed());
    EXPECT_TRUE(certify(p.c, 1000, seed).passed());
    EXPECT_TRUE(probe_firm_nonexpansive(p.a, 0.3, 500, seed).passed);
    for (const auto& blk : c.blocks) {
      EXPECT_TRUE(certify(blk.d_inv, 500, seed).passed());
      EXPECT_TRUE(certify(blk.c_inv, 500, seed).passed());
    }
  }
}

TEST(Lift, FlattenRoundTrip) {
  const CompositeProblem c = synthesize_composite(4, 3, 2);
  const Point flat = Point::LinSpaced(c.lifted_dim(), -1.0, 1.0);
  EXPECT_EQ(flatten(unflatten(c, flat)), flat);
}

TEST(Equivalence, BlockwiseMatchesLiftedOrfbs) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CompositeProblem c = synthesize_composite(seed, 1 + seed % 4, 1 + seed % 2);
    const ProblemInstance p = lift(c);
    const AggregateConstants k = aggregate_constants(c);
    const double lam = plan_step_size(k.lipschitz, k.cocoercivity).lambda;

    LiftedPoint init = zero_lifted(c);
    init.x.setConstant(0.3);
    SolverState generic = initial_state(p, flatten(init));
    PrimalDualState blockwise = initial_primal_dual_state(c, init);
    for (int i = 0; i < 200; ++i) {
      generic = orfbs_step(generic, p, lam);
      blockwise = primal_dual_step(blockwise, c, lam);
      ASSERT_LE((generic.x_curr - flatten(blockwise.curr)).lpNorm<Eigen::Infinity>(), 1e-12)
          << "seed " << seed << " iteration " << i;
    }
  }
}

TEST(Residuals, ZeroAtPlantedSolution) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const CompositeProblem c = synthesize_composite(seed, 4, 2);
    for (double mu : {0.5, 1.0, 2.0}) {
      const ResidualReport r = check_residuals(c, *c.known_x, *c.known_v, mu);
      EXPECT_LE(r.max(), 1e-10) << "seed " << seed << " mu " << mu;
    }
  }
}

TEST(Residuals, NonzeroAwayFromSolution) {
  const CompositeProblem c = synthesize_composite(7, 3, 1);
  LiftedPoint p = zero_lifted(c);
  p.x.setConstant(0.9);
  p.v[0].setConstant(-0.2);
  EXPECT_GT(check_residuals(c, p.x, p.v).max(), 0.01);
}

TEST(Residuals, RejectsBadProbe) {
  const CompositeProblem c = synthesize_composite(7, 3, 1);
  EXPECT_THROW(check_residuals(c, *c.known_x, *c.known_v, 0.0), InvalidParameter);
}

TEST(PrimalDualSolve, DegenerateBlock) {
  const CompositeProblem c = zero_composite(2, 2);
  const PrimalDualResult r = primal_dual_solve(c, StoppingRule{}, zero_lifted(c));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.trace.records.back().residual, 0.0);
}

TEST(PrimalDualSolve, PlantedConverges) {
  const double tol = 1e-7;
  const CompositeProblem c = synthesize_composite(11, 2, 1);
  const PrimalDualResult r =
      primal_dual_solve(c, StoppingRule{tol, 500'000, StopCriterion::residual}, zero_lifted(c));
  ASSERT_TRUE(r.converged);
  EXPECT_LE(check_residuals(c, r.x, r.v).max(), 10 * tol);
  EXPECT_LE((r.x - *c.known_x).norm(), 1e-5);
}

TEST(Composite, Validation) {
  CompositeProblem c = zero_composite(2, 2);
  c.blocks.clear();
  EXPECT_THROW(c.validate(), InvalidParameter);

  c = zero_composite(2, 2);
  c.blocks[0].l.setZero();
  EXPECT_THROW(c.validate(), InvalidParameter);

  c = zero_composite(2, 2);
  c.blocks[0].b = make_zero_set_valued(2);
  EXPECT_THROW(c.validate(), InvalidParameter);

  c = zero_composite(2, 2);
  c.blocks[0].r = pt({1});
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(Composite, JsonRoundTrip) {
  const CompositeProblem c = synthesize_composite(3, 3, 2);
  const CompositeProblem d = composite_from_json(composite_to_json(c));
  EXPECT_EQ(composite_to_json(d).dump(), composite_to_json(c).dump());
  const LiftedPoint x{pt({0.1, 0.2, 0.3}), {Point::Ones(c.blocks[0].dim()), Point::Ones(c.blocks[1].dim())}};
  EXPECT_EQ(flatten(lifted_apply_q(c, x)), flatten(lifted_apply_q(d, x)));
  EXPECT_EQ(flatten(lifted_resolvent(c, 0.4, x)), flatten(lifted_resolvent(d, 0.4, x)));
}

TEST(Composite, JsonMissingField) {
  auto j = composite_to_json(synthesize_composite(3, 2, 1));
  j["blocks"][0].erase("Li");
  EXPECT_THROW(composite_from_json(j), InvalidParameter);
}
