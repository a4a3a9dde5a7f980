#include "monosplit/benchmark_runner.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/oracle.hpp"
#include "monosplit/serialization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

namespace monosplit {

void RunConfig::validate() const {
  if (methods.empty()) throw ConfigError("config: methods list is empty");
  for (const auto& m : methods) {
    if (!parse_method(m)) throw ConfigError("config: unknown method '" + m + "'");
  }
  if (!(tol > 0.0)) throw ConfigError("config: tol must be positive");
  if (max_iters < 1) throw ConfigError("config: max_iters must be >= 1");
  if (lambda_mode == LambdaMode::fixed && !(lambda > 0.0 && std::isfinite(lambda))) {
    throw ConfigError("config: explicit lambda must be positive and finite");
  }
  if (!problem_path && dim < 1) throw ConfigError("config: dim must be >= 1");
}

bool BenchmarkSummary::any_diverged() const {
  return std::any_of(rows.begin(), rows.end(), [](const MethodSummary& r) { return r.diverged; });
}

nlohmann::json BenchmarkSummary::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"method", r.method},
                     {"lambda", r.lambda},
                     {"converged", r.converged},
                     {"diverged", r.diverged},
                     {"iterations", r.iterations},
                     {"final_residual", r.final_residual},
                     {"final_dist_to_ref", nullptr},
                     {"wall_time_ns", r.wall_time_ns},
                     {"trace_file", r.trace_file.filename().string()}};
    if (r.final_dist_to_ref) j["final_dist_to_ref"] = *r.final_dist_to_ref;
    if (!r.error.empty()) j["error"] = r.error;
    out.push_back(std::move(j));
  }
  return {{"methods", std::move(out)}};
}

ProblemInstance load_problem(const RunConfig& config) {
  if (config.problem_path) return problem_from_json(read_json_file(*config.problem_path));
  return synthesize_instance(config.seed, config.dim, config.recipe);
}

double benchmark_lambda(const RunConfig& config, Method method, const ProblemInstance& problem) {
  const double L = problem.lipschitz();
  const double beta = problem.cocoercivity();
  switch (config.lambda_mode) {
    case LambdaMode::fixed:
      return config.lambda;
    case LambdaMode::per_method:
      return default_step_size(method, L, beta);
    case LambdaMode::shared: {
      double lam = kUnbounded;
      for (const auto& name : config.methods) {
        lam = std::min(lam, default_step_size(*parse_method(name), L, beta));
      }
      return lam;
    }
  }
  return 0.0;
}

namespace {

struct MethodRun {
  MethodSummary summary;
  IterationTrace trace;
};

MethodRun run_one(const RunConfig& config, const ProblemInstance& problem, Method method,
                  const std::optional<Point>& reference) {
  MethodRun out;
  out.summary.method = std::string(to_string(method));
  out.summary.lambda = benchmark_lambda(config, method, problem);
  const StoppingRule stop{config.tol, config.max_iters, config.criterion};
  const Point x0 = Point::Zero(problem.dim());

  ProblemInstance p = problem;
  if (config.reference == ReferenceSource::none) p.known_solution.reset();

  const auto t0 = std::chrono::steady_clock::now();
  try {
    SolveResult r = solve(p, method, out.summary.lambda, stop, x0, std::nullopt, reference);
    out.summary.converged = r.converged;
    out.summary.iterations = r.iterations;
    out.trace = std::move(r.trace);
  } catch (const DivergenceError& e) {
    out.summary.diverged = true;
    out.summary.iterations = e.iteration();
    out.summary.error = e.what();
    out.trace = e.trace();
  }
  out.summary.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
  if (!out.trace.records.empty()) {
    out.summary.final_residual = out.trace.records.back().residual;
    out.summary.final_dist_to_ref = out.trace.records.back().dist_to_ref;
  }
  return out;
}

}  // namespace

BenchmarkSummary run_benchmark(const RunConfig& config, const ProblemInstance& problem) {
  config.validate();
  problem.validate();

  std::optional<Point> reference;
  if (config.reference == ReferenceSource::oracle) reference = oracle_solve(problem);
  if (config.reference == ReferenceSource::known) reference = problem.known_solution;
  if (config.criterion == StopCriterion::dist_to_ref && !reference) {
    throw ConfigError("config: dist-to-ref stopping needs a reference solution");
  }

  std::vector<Method> methods;
  for (const auto& name : config.methods) methods.push_back(*parse_method(name));

  std::vector<MethodRun> runs;
  if (config.concurrent) {
    std::vector<std::future<MethodRun>> futures;
    for (Method m : methods) {
      futures.push_back(std::async(std::launch::async, run_one, std::cref(config),
                                   std::cref(problem), m, std::cref(reference)));
    }
    for (auto& f : futures) runs.push_back(f.get());
  } else {
    for (Method m : methods) runs.push_back(run_one(config, problem, m, reference));
  }

  // Single writer, in configuration order.
  std::filesystem::create_directories(config.output_dir);
  BenchmarkSummary summary;
  for (auto& run : runs) {
    run.summary.trace_file =
        config.output_dir / (run.summary.method + std::string(file_extension(config.format)));
    write_trace(run.summary.trace_file, run.trace, config.format);
    summary.rows.push_back(std::move(run.summary));
  }
  write_json_file(config.output_dir / "summary.json", summary.to_json());
  return summary;
}

BenchmarkSummary run_benchmark(const RunConfig& config) {
  config.validate();
  return run_benchmark(config, load_problem(config));
}

}  // namespace monosplit
