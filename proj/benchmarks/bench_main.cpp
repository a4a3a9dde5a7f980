#include "monosplit/algorithms.hpp"
#include "monosplit/families.hpp"
#include "monosplit/product_space.hpp"
#include "monosplit/step_size.hpp"

#include <benchmark/benchmark.h>

using namespace monosplit;

namespace {

void BM_Step(benchmark::State& state, Method method) {
  const ProblemInstance p =
      synthesize_instance(1, static_cast<Index>(state.range(0)), Recipe::affine_interior);
  const double lam = default_step_size(method, p.lipschitz(), p.cocoercivity());
  SolverState s = initial_state(p, Point::Zero(p.dim()));
  for (auto _ : state) {
    s = step(method, s, p, lam);
    benchmark::DoNotOptimize(s.x_curr.data());
  }
  state.SetItemsProcessed(state.iterations());
}

BENCHMARK_CAPTURE(BM_Step, orfbs, Method::orfbs)->Arg(10)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_Step, fbfs, Method::fbfs)->Arg(10)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_Step, fbhfs, Method::fbhfs)->Arg(10)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_Step, sfrbs, Method::sfrbs)->Arg(10)->Arg(50)->Arg(200);

void BM_Resolvent(benchmark::State& state, int family) {
  const Index n = static_cast<Index>(state.range(0));
  const SetValuedOp op = family == 0   ? make_box_normal_cone(Point::Constant(n, -1), Point::Ones(n))
                         : family == 1 ? make_ball_normal_cone(Point::Zero(n), 1.0)
                         : family == 2 ? make_l1_subdifferential(n, 0.5)
                                       : make_affine_monotone(Matrix::Identity(n, n) * 2.0, Point::Ones(n));
  const Point x = Point::LinSpaced(n, -3.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.resolvent(0.7, x));
  }
}

BENCHMARK_CAPTURE(BM_Resolvent, box, 0)->Arg(50);
BENCHMARK_CAPTURE(BM_Resolvent, ball, 1)->Arg(50);
BENCHMARK_CAPTURE(BM_Resolvent, l1, 2)->Arg(50);
BENCHMARK_CAPTURE(BM_Resolvent, affine, 3)->Arg(50);

void BM_Planner(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_step_size(2.0, 0.5).lambda);
  }
}
BENCHMARK(BM_Planner);

void BM_PrimalDualStep(benchmark::State& state) {
  const CompositeProblem c = synthesize_composite(1, 8, 2);
  const AggregateConstants k = aggregate_constants(c);
  const double lam = plan_step_size(k.lipschitz, k.cocoercivity).lambda;
  PrimalDualState s = initial_primal_dual_state(c, zero_lifted(c));
  for (auto _ : state) {
    s = primal_dual_step(s, c, lam);
    benchmark::DoNotOptimize(s.curr.x.data());
  }
}
BENCHMARK(BM_PrimalDualStep);

}  // namespace

BENCHMARK_MAIN();
