#include "monosplit/algorithms.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <string>

namespace monosplit {

namespace {

constexpr std::array kMethods{Method::orfbs, Method::fbs,   Method::fbfs,  Method::fbhfs,
                              Method::sfrbs, Method::frbs,  Method::srfbs, Method::rfbs,
                              Method::csetnek2, Method::csetnek3};

SolverState advance(const SolverState& s, Point next, Point b_curr) {
  return SolverState{std::move(next), s.x_curr, std::move(b_curr), s.k + 1};
}

// Operator failures inside an iteration surface as divergence at the
// iteration being computed.
template <class F>
SolverState guarded(const SolverState& s, F&& body) {
  try {
    return body();
  } catch (const DivergenceError&) {
    throw;
  } catch (const NumericError& e) {
    throw DivergenceError(s.k + 1, e.what());
  }
}

// 0.99 num / den, or 1 when nothing binds (den = 0).
double strict_bound(double num, double den) {
  return den > 0.0 ? kStrictBoundFactor * num / den : 1.0;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::orfbs: return "orfbs";
    case Method::fbs: return "fbs";
    case Method::fbfs: return "fbfs";
    case Method::fbhfs: return "fbhfs";
    case Method::sfrbs: return "sfrbs";
    case Method::frbs: return "frbs";
    case Method::srfbs: return "srfbs";
    case Method::rfbs: return "rfbs";
    case Method::csetnek2: return "csetnek2";
    case Method::csetnek3: return "csetnek3";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::span<const Method> all_methods() { return kMethods; }

SolverState initial_state(const ProblemInstance& problem, const Point& x0,
                          const std::optional<Point>& x_minus1) {
  require_dim(problem.dim(), x0.size(), "initial point x0");
  require_finite(x0, "initial point x0");
  Point prev = x_minus1.value_or(x0);
  require_dim(problem.dim(), prev.size(), "initial point x_{-1}");
  require_finite(prev, "initial point x_{-1}");
  Point b_prev = problem.b.apply(prev);
  return SolverState{x0, std::move(prev), std::move(b_prev), 0};
}

SolverState orfbs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return guarded(s, [&] {
    Point b = p.b.apply(s.x_curr);
    const Point c = p.c.apply(s.x_curr);
    Point next = p.a.resolvent(lambda, s.x_curr - lambda * b - lambda * c) - lambda * (b - s.b_prev);
    return advance(s, std::move(next), std::move(b));
  });
}

SolverState fbs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return guarded(s, [&] {
    const Point c = p.c.apply(s.x_curr);
    Point next = p.a.resolvent(lambda, s.x_curr - lambda * c);
    return advance(s, std::move(next), p.b.apply(s.x_curr));
  });
}

SolverState fbfs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return guarded(s, [&] {
    Point b = p.b.apply(s.x_curr);
    const Point u = p.a.resolvent(lambda, s.x_curr - lambda * b);
    Point next = u + lambda * b - lambda * p.b.apply(u);
    return advance(s, std::move(next), std::move(b));
  });
}

SolverState fbhfs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return guarded(s, [&] {
    Point b = p.b.apply(s.x_curr);
    const Point c = p.c.apply(s.x_curr);
    const Point u = p.a.resolvent(lambda, s.x_curr - lambda * b - lambda * c);
    Point next = u + lambda * b - lambda * p.b.apply(u);
    return advance(s, std::move(next), std::move(b));
  });
}

namespace {

SolverState forward_reflected(const SolverState& s, const ProblemInstance& p, double lambda,
                              bool with_c) {
  return guarded(s, [&] {
    Point b = p.b.apply(s.x_curr);
    Point fwd = s.x_curr - 2.0 * lambda * b + lambda * s.b_prev;
    if (with_c) fwd -= lambda * p.c.apply(s.x_curr);
    return advance(s, p.a.resolvent(lambda, fwd), std::move(b));
  });
}

SolverState reflected(const SolverState& s, const ProblemInstance& p, double lambda,
                      bool with_c) {
  return guarded(s, [&] {
    const Point reflected_point = 2.0 * s.x_curr - s.x_prev;
    Point fwd = s.x_curr - lambda * p.b.apply(reflected_point);
    if (with_c) fwd -= lambda * p.c.apply(s.x_curr);
    Point next = p.a.resolvent(lambda, fwd);
    // Second B evaluation keeps the b_prev cache coherent.
    return advance(s, std::move(next), p.b.apply(s.x_curr));
  });
}

}  // namespace

SolverState sfrbs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return forward_reflected(s, p, lambda, true);
}

SolverState frbs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return forward_reflected(s, p, lambda, false);
}

SolverState srfbs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return reflected(s, p, lambda, true);
}

SolverState rfbs_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return reflected(s, p, lambda, false);
}

SolverState csetnek2_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return guarded(s, [&] {
    Point b = p.b.apply(s.x_curr);
    Point next = p.a.resolvent(lambda, s.x_curr - lambda * b) - lambda * (b - s.b_prev);
    return advance(s, std::move(next), std::move(b));
  });
}

SolverState csetnek3_step(const SolverState& s, const ProblemInstance& p, double lambda) {
  return guarded(s, [&] {
    Point b = p.b.apply(s.x_curr);
    const Point c = p.c.apply(s.x_curr);
    const Point c_prev = p.c.apply(s.x_prev);
    Point next = p.a.resolvent(lambda, s.x_curr - lambda * b - lambda * c) -
                 lambda * ((b + c) - (s.b_prev + c_prev));
    return advance(s, std::move(next), std::move(b));
  });
}

SolverState step(Method m, const SolverState& s, const ProblemInstance& p, double lambda) {
  switch (m) {
    case Method::orfbs: return orfbs_step(s, p, lambda);
    case Method::fbs: return fbs_step(s, p, lambda);
    case Method::fbfs: return fbfs_step(s, p, lambda);
    case Method::fbhfs: return fbhfs_step(s, p, lambda);
    case Method::sfrbs: return sfrbs_step(s, p, lambda);
    case Method::frbs: return frbs_step(s, p, lambda);
    case Method::srfbs: return srfbs_step(s, p, lambda);
    case Method::rfbs: return rfbs_step(s, p, lambda);
    case Method::csetnek2: return csetnek2_step(s, p, lambda);
    case Method::csetnek3: return csetnek3_step(s, p, lambda);
  }
  throw ContractViolation("step: unknown method");
}

double default_step_size(Method m, double lipschitz, double cocoercivity) {
  const double L = lipschitz;
  const double beta = cocoercivity;
  const bool inf_beta = std::isinf(beta);
  constexpr double f = kStrictBoundFactor;
  switch (m) {
    case Method::orfbs:
      return plan_step_size(L, beta).lambda;
    case Method::fbs:
      return inf_beta ? 1.0 : f * 2.0 * beta;
    case Method::fbfs:
      return strict_bound(1.0, L);
    case Method::fbhfs:
      if (inf_beta) return strict_bound(1.0, L);
      return f * 4.0 * beta / (1.0 + std::sqrt(1.0 + 16.0 * beta * beta * L * L));
    case Method::sfrbs:
    case Method::srfbs:
      // No closed-form bound is published for srfbs; it reuses sfrbs's.
      if (inf_beta) return strict_bound(1.0, 2.0 * L);
      return f * 2.0 * beta / (4.0 * beta * L + 1.0);
    case Method::frbs:
    case Method::rfbs:
      return strict_bound(1.0, 2.0 * L);
    case Method::csetnek2:
      return strict_bound(1.0, 3.0 * L);
    case Method::csetnek3:
      return strict_bound(1.0, 3.0 * (L + (inf_beta ? 0.0 : 1.0 / beta)));
  }
  throw ContractViolation("default_step_size: unknown method");
}

std::string_view to_string(StopCriterion c) {
  switch (c) {
    case StopCriterion::step_norm: return "step-norm";
    case StopCriterion::residual: return "residual";
    case StopCriterion::dist_to_ref: return "dist-to-ref";
  }
  return "unknown";
}

std::optional<StopCriterion> parse_criterion(std::string_view name) {
  for (auto c : {StopCriterion::step_norm, StopCriterion::residual, StopCriterion::dist_to_ref}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

void StoppingRule::validate() const {
  if (!(tol > 0.0)) throw InvalidParameter("stopping rule: tol must be positive");
  if (max_iters < 1) throw InvalidParameter("stopping rule: max_iters must be >= 1");
}

DivergenceError::DivergenceError(long iteration, const std::string& what)
    : NumericError("divergence at iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

Reference Reference::make(const ProblemInstance& problem, Point x) {
  require_dim(problem.dim(), x.size(), "reference point");
  Point bx = problem.b.apply(x);
  Point cx = problem.c.apply(x);
  return Reference{std::move(x), std::move(bx), std::move(cx)};
}

double lyapunov_value(const SolverState& s, const Point& ref_x, const Point& ref_bx,
                      double lambda) {
  require_dim(s.x_curr.size(), ref_x.size(), "lyapunov reference");
  require_dim(s.x_curr.size(), ref_bx.size(), "lyapunov reference B value");
  const Point a_k = s.x_curr + lambda * s.b_prev;
  const Point a_ref = ref_x + lambda * ref_bx;
  return (a_k - a_ref).squaredNorm() + 0.5 * (s.x_curr - s.x_prev).squaredNorm();
}

void diagnostics_update(IterationTrace& trace, const SolverState& s,
                        const ProblemInstance& problem, double lambda, const Reference* ref,
                        std::int64_t wall_time_ns) {
  const Point b = problem.b.apply(s.x_curr);
  const Point c = problem.c.apply(s.x_curr);
  const Point j = problem.a.resolvent(lambda, s.x_curr - lambda * b - lambda * c);

  TraceRecord r;
  r.k = s.k;
  r.residual = (s.x_curr - j).norm();
  r.step_norm = (s.x_curr - s.x_prev).norm();
  r.wall_time_ns = wall_time_ns;
  if (ref) {
    r.dist_to_ref = (s.x_curr - ref->x).norm();
    r.lyapunov = lyapunov_value(s, ref->x, ref->bx, lambda);
    const double prev =
        trace.records.empty() ? 0.0 : trace.records.back().cum_c_error.value_or(0.0);
    r.cum_c_error = prev + (c - ref->cx).squaredNorm();
  }
  trace.records.push_back(r);
}

SolveResult solve(const ProblemInstance& problem, Method method, double lambda,
                  const StoppingRule& stop, const Point& x0, const std::optional<Point>& x_minus1,
                  const std::optional<Point>& reference) {
  stop.validate();
  problem.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("solve: lambda must be positive and finite");
  }

  std::optional<Reference> ref;
  if (reference) {
    ref = Reference::make(problem, *reference);
  } else if (problem.known_solution) {
    ref = Reference::make(problem, *problem.known_solution);
  }
  if (stop.criterion == StopCriterion::dist_to_ref && !ref) {
    throw InvalidParameter("solve: dist-to-ref stopping needs a reference point");
  }

  SolverState state = initial_state(problem, x0, x_minus1);
  SolveResult result;
  result.trace.records.reserve(static_cast<std::size_t>(std::min(stop.max_iters, 1'000'000L)));
  const auto t0 = std::chrono::steady_clock::now();

  try {
    for (long it = 0; it < stop.max_iters; ++it) {
      state = step(method, state, problem, lambda);
      if (!state.x_curr.allFinite() ||
          state.x_curr.lpNorm<Eigen::Infinity>() > kDivergenceThreshold) {
        throw DivergenceError(state.k, "iterate left the finite range");
      }
      const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
      try {
        diagnostics_update(result.trace, state, problem, lambda, ref ? &*ref : nullptr, elapsed);
      } catch (const NumericError& e) {
        throw DivergenceError(state.k, e.what());
      }
      const TraceRecord& r = result.trace.records.back();
      double metric = r.step_norm;
      if (stop.criterion == StopCriterion::residual) metric = r.residual;
      if (stop.criterion == StopCriterion::dist_to_ref) metric = *r.dist_to_ref;
      if (metric <= stop.tol) {
        result.converged = true;
        break;
      }
    }
  } catch (DivergenceError& e) {
    e.attach_trace(std::move(result.trace));
    throw;
  }

  result.x = state.x_curr;
  result.iterations = state.k;
  return result;
}

}  // namespace monosplit
