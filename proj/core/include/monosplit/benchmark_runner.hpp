#pragma once

#include "monosplit/algorithms.hpp"
#include "monosplit/problem.hpp"
#include "monosplit/trace_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace monosplit {

enum class LambdaMode {
  per_method,  ///< each method's own step rule
  shared,      ///< smallest of the methods' own rules, used by all
  fixed,       ///< `RunConfig::lambda` for all methods
};

enum class ReferenceSource {
  known,   ///< the instance's planted solution, when present
  oracle,  ///< oracle_solve
  none,
};

struct RunConfig {
  /// Problem file; when empty an instance is synthesized from the fields below.
  std::optional<std::filesystem::path> problem_path;
  Recipe recipe = Recipe::affine_interior;
  Index dim = 4;
  std::uint64_t seed = 1;

  std::vector<std::string> methods;
  LambdaMode lambda_mode = LambdaMode::per_method;
  double lambda = 0.0;  ///< only for LambdaMode::fixed
  double tol = 1e-8;
  long max_iters = 100'000;
  StopCriterion criterion = StopCriterion::residual;
  ReferenceSource reference = ReferenceSource::known;

  std::filesystem::path output_dir = ".";
  TraceFormat format = TraceFormat::csv;
  /// Run methods on separate threads. Output is identical either way.
  bool concurrent = false;

  /// Throws ConfigError naming the first problem found.
  void validate() const;
};

struct MethodSummary {
  std::string method;
  double lambda = 0.0;
  bool converged = false;
  bool diverged = false;
  long iterations = 0;
  double final_residual = 0.0;
  std::optional<double> final_dist_to_ref;
  std::int64_t wall_time_ns = 0;
  std::string error;
  std::filesystem::path trace_file;
};

struct BenchmarkSummary {
  std::vector<MethodSummary> rows;

  bool any_diverged() const;
  nlohmann::json to_json() const;
};

/// Loads or synthesizes the instance described by `config`.
ProblemInstance load_problem(const RunConfig& config);

/// Step size `method` runs with under `config`'s lambda mode.
double benchmark_lambda(const RunConfig& config, Method method, const ProblemInstance& problem);

/// Solves `problem` with every configured method from x0 = 0, writes one
/// trace per method and summary.json into output_dir. A diverging method is
/// recorded and the sweep continues.
BenchmarkSummary run_benchmark(const RunConfig& config, const ProblemInstance& problem);
BenchmarkSummary run_benchmark(const RunConfig& config);

}  // namespace monosplit
