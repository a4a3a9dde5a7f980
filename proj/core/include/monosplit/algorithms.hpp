#pragma once

#include "monosplit/errors.hpp"
#include "monosplit/problem.hpp"
#include "monosplit/step_size.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace monosplit {

enum class Method {
  orfbs,     ///< outer reflected forward-backward
  fbs,       ///< forward-backward, ignores B
  fbfs,      ///< Tseng forward-backward-forward, ignores C
  fbhfs,     ///< forward-backward-half-forward
  sfrbs,     ///< semi-forward-reflected-backward
  frbs,      ///< forward-reflected-backward (sfrbs without C)
  srfbs,     ///< semi-reflected forward-backward
  rfbs,      ///< reflected forward-backward (srfbs without C)
  csetnek2,  ///< outer reflection on B only, ignores C
  csetnek3,  ///< outer reflection on B + C
};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
std::span<const Method> all_methods();

/// Iterate pair (x_k, x_{k-1}) plus the cached B x_{k-1}.
struct SolverState {
  Point x_curr;
  Point x_prev;
  Point b_prev;  ///< always B(x_prev)
  long k = 0;
};

/// x_{-1} defaults to x0, so the first reflected correction vanishes.
SolverState initial_state(const ProblemInstance& problem, const Point& x0,
                          const std::optional<Point>& x_minus1 = std::nullopt);

/// x_{k+1} = J(x_k - lambda B x_k - lambda C x_k) - lambda (B x_k - B x_{k-1}).
/// One evaluation each of B, C and the resolvent.
SolverState orfbs_step(const SolverState& s, const ProblemInstance& p, double lambda);

/// x_{k+1} = J(x_k - lambda C x_k).
SolverState fbs_step(const SolverState& s, const ProblemInstance& p, double lambda);
/// u = J(x_k - lambda B x_k); x_{k+1} = u + lambda B x_k - lambda B u.
SolverState fbfs_step(const SolverState& s, const ProblemInstance& p, double lambda);
/// u = J(x_k - lambda (B + C) x_k); x_{k+1} = u + lambda B x_k - lambda B u.
SolverState fbhfs_step(const SolverState& s, const ProblemInstance& p, double lambda);
/// x_{k+1} = J(x_k - 2 lambda B x_k + lambda B x_{k-1} - lambda C x_k).
SolverState sfrbs_step(const SolverState& s, const ProblemInstance& p, double lambda);
SolverState frbs_step(const SolverState& s, const ProblemInstance& p, double lambda);
/// x_{k+1} = J(x_k - lambda B(2 x_k - x_{k-1}) - lambda C x_k).
SolverState srfbs_step(const SolverState& s, const ProblemInstance& p, double lambda);
SolverState rfbs_step(const SolverState& s, const ProblemInstance& p, double lambda);
/// x_{k+1} = J(x_k - lambda B x_k) - lambda (B x_k - B x_{k-1}).
SolverState csetnek2_step(const SolverState& s, const ProblemInstance& p, double lambda);
/// x_{k+1} = J(x_k - lambda (B + C) x_k) - lambda ((B + C) x_k - (B + C) x_{k-1}).
SolverState csetnek3_step(const SolverState& s, const ProblemInstance& p, double lambda);

SolverState step(Method m, const SolverState& s, const ProblemInstance& p, double lambda);

/// Step size each method's own convergence theory allows, for B L-Lipschitz
/// and C beta-cocoercive. For orfbs this is the auto-planned lambda.
double default_step_size(Method m, double lipschitz, double cocoercivity);

struct TraceRecord {
  long k = 0;
  double residual = 0.0;
  double step_norm = 0.0;
  std::optional<double> dist_to_ref;
  std::optional<double> lyapunov;
  std::optional<double> cum_c_error;
  std::int64_t wall_time_ns = 0;
};

struct IterationTrace {
  std::vector<TraceRecord> records;
};

enum class StopCriterion { step_norm, residual, dist_to_ref };

std::string_view to_string(StopCriterion c);
std::optional<StopCriterion> parse_criterion(std::string_view name);

struct StoppingRule {
  double tol = 1e-8;
  long max_iters = 100'000;
  StopCriterion criterion = StopCriterion::step_norm;

  /// Throws InvalidParameter unless tol > 0 and max_iters >= 1.
  void validate() const;
};

/// Coordinates above this magnitude count as divergence.
inline constexpr double kDivergenceThreshold = 1e12;

class DivergenceError : public NumericError {
 public:
  DivergenceError(long iteration, const std::string& what);
  long iteration() const { return iteration_; }
  const IterationTrace& trace() const { return trace_; }
  void attach_trace(IterationTrace trace) { trace_ = std::move(trace); }

 private:
  long iteration_;
  IterationTrace trace_;
};

/// Precomputed reference point for distance / Lyapunov diagnostics.
struct Reference {
  Point x;
  Point bx;  ///< B(x)
  Point cx;  ///< C(x)

  static Reference make(const ProblemInstance& problem, Point x);
};

/// ||(x_k + lambda B x_{k-1}) - (x* + lambda B x*)||^2 + 1/2 ||x_k - x_{k-1}||^2.
double lyapunov_value(const SolverState& s, const Point& ref_x, const Point& ref_bx,
                      double lambda);

/// Appends the record for state `s`. Evaluates B, C and J once each for the
/// fixed-point residual.
void diagnostics_update(IterationTrace& trace, const SolverState& s,
                        const ProblemInstance& problem, double lambda,
                        const Reference* ref, std::int64_t wall_time_ns = 0);

struct SolveResult {
  Point x;
  IterationTrace trace;
  bool converged = false;
  long iterations = 0;
};

/// Iterates `method` from (x0, x_{-1}) until the stopping criterion drops to
/// `stop.tol` or `stop.max_iters` steps have run. The reference defaults to
/// the problem's known solution. Throws DivergenceError (with the partial
/// trace) when an iterate leaves the finite range.
SolveResult solve(const ProblemInstance& problem, Method method, double lambda,
                  const StoppingRule& stop, const Point& x0,
                  const std::optional<Point>& x_minus1 = std::nullopt,
                  const std::optional<Point>& reference = std::nullopt);

inline SolveResult solve(const ProblemInstance& problem, Method method, const StepSizePlan& plan,
                         const StoppingRule& stop, const Point& x0,
                         const std::optional<Point>& x_minus1 = std::nullopt,
                         const std::optional<Point>& reference = std::nullopt) {
  return solve(problem, method, plan.lambda, stop, x0, x_minus1, reference);
}

}  // namespace monosplit
