#include "monosplit/cli.hpp"

#include "monosplit/algorithms.hpp"
#include "monosplit/benchmark_runner.hpp"
#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"
#include "monosplit/oracle.hpp"
#include "monosplit/product_space.hpp"
#include "monosplit/serialization.hpp"
#include "monosplit/step_size.hpp"
#include "monosplit/trace_io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace monosplit::cli {

namespace {

using json = nlohmann::json;

spdlog::level::level_enum level_from_env() {
  const char* v = std::getenv("MONOSPLIT_LOG");
  if (!v) return spdlog::level::warn;
  const std::string s(v);
  if (s == "off") return spdlog::level::off;
  if (s == "info") return spdlog::level::info;
  if (s == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("monosplit", sink);
  log->set_pattern("[%l] %v");
  log->set_level(level_from_env());
  return log;
}

// "auto" or a positive number.
std::optional<double> parse_lambda(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("--lambda must be 'auto' or a positive number, got '" + s + "'");
  }
  if (used != s.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("--lambda must be 'auto' or a positive number, got '" + s + "'");
  }
  return v;
}

Method require_method(const std::string& name) {
  auto m = parse_method(name);
  if (!m) throw ConfigError("unknown method '" + name + "'");
  return *m;
}

StopCriterion require_criterion(const std::string& name) {
  auto c = parse_criterion(name);
  if (!c) throw ConfigError("unknown stopping criterion '" + name + "'");
  return *c;
}

TraceFormat require_format(const std::string& name) {
  auto f = parse_trace_format(name);
  if (!f) throw ConfigError("unknown trace format '" + name + "'");
  return *f;
}

json plan_to_json(const StepSizePlan& p) {
  return {{"lambda", p.lambda}, {"eps1", p.eps1}, {"eps2", p.eps2}, {"eps3", p.eps3},
          {"unconstrained", p.unconstrained}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct GenOptions {
  std::uint64_t seed = 1;
  Index dim = 4;
  std::string kind = "affine-interior";
  Index blocks = 1;
  std::string out;
};

struct SolveOptions {
  std::string problem;
  std::string method = "orfbs";
  std::string lambda = "auto";
  std::optional<double> eps1, eps2, eps3;
  double tol = 1e-8;
  long max_iters = 100'000;
  std::string criterion = "residual";
  std::string trace;
  std::string format = "csv";
  bool oracle = false;
};

struct BenchOptions {
  std::string problem;
  std::uint64_t seed = 1;
  Index dim = 4;
  std::string kind = "affine-interior";
  std::string methods = "orfbs,fbs,fbfs,fbhfs,sfrbs,frbs,srfbs,rfbs,csetnek2,csetnek3";
  std::string lambda = "auto";
  bool shared_lambda = false;
  double tol = 1e-8;
  long max_iters = 100'000;
  std::string criterion = "residual";
  std::string reference = "known";
  std::string out_dir = "bench-out";
  std::string format = "csv";
  bool concurrent = false;
};

struct CertifyOptions {
  std::string problem;
  int samples = 1000;
  std::uint64_t seed = 1;
  double lambda = 1.0;
};

struct PdOptions {
  std::string problem;
  double tol = 1e-8;
  long max_iters = 500'000;
  std::string criterion = "residual";
  std::string trace;
  std::string format = "csv";
};

int run_gen(const GenOptions& o, std::ostream& out, spdlog::logger& log) {
  json j;
  if (o.kind == "composite") {
    j = composite_to_json(synthesize_composite(o.seed, o.dim, o.blocks));
  } else {
    j = problem_to_json(synthesize_instance(o.seed, o.dim, parse_recipe(o.kind)));
  }
  if (o.out.empty() || o.out == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(o.out, j);
    log.info("wrote {} instance to {}", o.kind, o.out);
  }
  return kExitOk;
}

int run_solve(const SolveOptions& o, std::ostream& out, spdlog::logger& log) {
  const Method method = require_method(o.method);
  const StoppingRule stop{o.tol, o.max_iters, require_criterion(o.criterion)};
  stop.validate();
  const std::optional<double> fixed = parse_lambda(o.lambda);
  const bool any_eps = o.eps1 || o.eps2 || o.eps3;
  if (any_eps && !(o.eps1 && o.eps2 && o.eps3)) {
    throw ConfigError("--eps1, --eps2 and --eps3 must be given together");
  }
  if (any_eps && (fixed || method != Method::orfbs)) {
    throw ConfigError("epsilon overrides apply to orfbs with --lambda auto only");
  }
  const ProblemInstance problem = problem_from_json(read_json_file(o.problem));

  json result{{"method", to_string(method)}};
  double lambda = 0.0;
  if (fixed) {
    lambda = *fixed;
  } else if (method == Method::orfbs) {
    std::optional<EpsilonOverrides> ov;
    if (any_eps) ov = EpsilonOverrides{*o.eps1, *o.eps2, *o.eps3};
    const StepSizePlan plan = plan_step_size(problem.lipschitz(), problem.cocoercivity(), ov);
    if (plan.unconstrained) log.warn("no step-size bound binds (L = 0, beta = inf); lambda = 1");
    result["plan"] = plan_to_json(plan);
    lambda = plan.lambda;
  } else {
    lambda = default_step_size(method, problem.lipschitz(), problem.cocoercivity());
  }
  log.info("solving with {} at lambda = {}", to_string(method), lambda);

  std::optional<Point> reference;
  if (o.oracle) reference = oracle_solve(problem);

  auto write_out_trace = [&](const IterationTrace& t) {
    if (!o.trace.empty()) write_trace(o.trace, t, require_format(o.format));
  };
  try {
    const SolveResult r = solve(problem, method, lambda, stop, Point::Zero(problem.dim()),
                                std::nullopt, reference);
    write_out_trace(r.trace);
    result["lambda"] = lambda;
    result["converged"] = r.converged;
    result["iterations"] = r.iterations;
    result["x"] = point_to_json(r.x);
    if (!r.trace.records.empty()) {
      const auto& last = r.trace.records.back();
      result["final_residual"] = last.residual;
      if (last.dist_to_ref) result["final_dist_to_ref"] = *last.dist_to_ref;
    }
    if (!r.converged) log.warn("stopping tolerance not reached in {} iterations", r.iterations);
  } catch (const DivergenceError& e) {
    write_out_trace(e.trace());
    throw;
  }
  out << result.dump(2) << '\n';
  return kExitOk;
}

int run_bench(const BenchOptions& o, std::ostream& out, spdlog::logger& log) {
  RunConfig cfg;
  if (!o.problem.empty()) cfg.problem_path = o.problem;
  cfg.seed = o.seed;
  cfg.dim = o.dim;
  cfg.recipe = parse_recipe(o.kind);
  cfg.methods = split_list(o.methods);
  const std::optional<double> fixed = parse_lambda(o.lambda);
  if (fixed && o.shared_lambda) throw ConfigError("--shared-lambda conflicts with an explicit --lambda");
  if (fixed) {
    cfg.lambda_mode = LambdaMode::fixed;
    cfg.lambda = *fixed;
  } else if (o.shared_lambda) {
    cfg.lambda_mode = LambdaMode::shared;
  }
  cfg.tol = o.tol;
  cfg.max_iters = o.max_iters;
  cfg.criterion = require_criterion(o.criterion);
  if (o.reference == "known") {
    cfg.reference = ReferenceSource::known;
  } else if (o.reference == "oracle") {
    cfg.reference = ReferenceSource::oracle;
  } else if (o.reference == "none") {
    cfg.reference = ReferenceSource::none;
  } else {
    throw ConfigError("unknown reference source '" + o.reference + "'");
  }
  cfg.output_dir = o.out_dir;
  cfg.format = require_format(o.format);
  cfg.concurrent = o.concurrent;
  cfg.validate();

  const BenchmarkSummary summary = run_benchmark(cfg);
  out << std::left << std::setw(10) << "method" << std::setw(14) << "lambda" << std::setw(12)
      << "iterations" << std::setw(14) << "residual" << std::setw(14) << "wall_ms"
      << "status\n";
  for (const auto& r : summary.rows) {
    const char* status = r.diverged ? "diverged" : (r.converged ? "converged" : "max_iters");
    out << std::setw(10) << r.method << std::setw(14) << format_double(r.lambda) << std::setw(12)
        << r.iterations << std::setw(14) << std::setprecision(4) << r.final_residual
        << std::setw(14) << static_cast<double>(r.wall_time_ns) / 1e6 << status << '\n';
    if (r.diverged) log.error("{}: {}", r.method, r.error);
  }
  return summary.any_diverged() ? kExitDivergence : kExitOk;
}

int run_certify(const CertifyOptions& o, std::ostream& out) {
  if (o.samples < 1) throw ConfigError("--samples must be >= 1");
  if (!(o.lambda > 0.0)) throw ConfigError("--lambda must be positive");
  const ProblemInstance p = problem_from_json(read_json_file(o.problem));
  const CertReport b = certify(p.b, o.samples, o.seed);
  const CertReport c = certify(p.c, o.samples, o.seed + 1);
  const ProbeResult firm = probe_firm_nonexpansive(p.a, o.lambda, o.samples, o.seed + 2);
  auto probe_json = [](const ProbeResult& r) {
    return json{{"passed", r.passed}, {"worst_margin", r.worst_margin}, {"samples", r.samples}};
  };
  json report{{"B", b.to_json()}, {"C", c.to_json()}, {"A_firm_nonexpansive", probe_json(firm)}};
  bool ok = b.passed() && c.passed() && firm.passed;
  if (p.a.impl().has_inverse_resolvent()) {
    const ProbeResult inv = probe_inverse_resolvent_identity(p.a, o.lambda, o.samples, o.seed + 3);
    report["A_inverse_resolvent_identity"] = probe_json(inv);
    ok = ok && inv.passed;
  }
  report["passed"] = ok;
  out << report.dump(2) << '\n';
  return ok ? kExitOk : kExitConfig;
}

int run_pd_solve(const PdOptions& o, std::ostream& out, spdlog::logger& log) {
  const StoppingRule stop{o.tol, o.max_iters, require_criterion(o.criterion)};
  const CompositeProblem p = composite_from_json(read_json_file(o.problem));
  const AggregateConstants k = aggregate_constants(p);
  log.info("aggregate constants: L = {}, beta = {}", k.lipschitz, k.cocoercivity);
  try {
    const PrimalDualResult r = primal_dual_solve(p, stop, zero_lifted(p));
    if (!o.trace.empty()) write_trace(o.trace, r.trace, require_format(o.format));
    const ResidualReport res = check_residuals(p, r.x, r.v);
    json v = json::array();
    for (const auto& vi : r.v) v.push_back(point_to_json(vi));
    json result{{"plan", plan_to_json(r.plan)},
                {"lipschitz_bar", k.lipschitz},
                {"converged", r.converged},
                {"iterations", r.iterations},
                {"x", point_to_json(r.x)},
                {"v", std::move(v)},
                {"primal_residual", res.primal},
                {"dual_residuals", res.dual}};
    result["beta_bar"] = std::isinf(k.cocoercivity) ? json("inf") : json(k.cocoercivity);
    out << result.dump(2) << '\n';
  } catch (const DivergenceError& e) {
    if (!o.trace.empty()) write_trace(o.trace, e.trace(), require_format(o.format));
    throw;
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);

  CLI::App app{"Monotone inclusion splitting solvers"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write a synthesized instance with a planted solution");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--dim", gen.dim, "Dimension")->check(CLI::PositiveNumber);
  g->add_option("--kind", gen.kind,
                "affine-interior | l1-lasso-like | ball-boundary | composite");
  g->add_option("--blocks", gen.blocks, "Dual blocks for --kind composite")->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "Output path (stdout when omitted)");

  SolveOptions sol;
  auto* s = app.add_subcommand("solve", "Run one method on one problem");
  s->add_option("--problem", sol.problem, "Problem JSON")->required();
  s->add_option("--method", sol.method, "orfbs | fbs | fbfs | fbhfs | sfrbs | frbs | srfbs | rfbs | csetnek2 | csetnek3");
  s->add_option("--lambda", sol.lambda, "Step size or 'auto'");
  s->add_option("--eps1", sol.eps1, "Override eps1 of the orfbs plan");
  s->add_option("--eps2", sol.eps2, "Override eps2 of the orfbs plan");
  s->add_option("--eps3", sol.eps3, "Override eps3 of the orfbs plan");
  s->add_option("--tol", sol.tol, "Stopping tolerance");
  s->add_option("--max-iters", sol.max_iters, "Iteration cap");
  s->add_option("--criterion", sol.criterion, "step-norm | residual | dist-to-ref");
  s->add_option("--trace", sol.trace, "Trace output path");
  s->add_option("--format", sol.format, "csv | json");
  s->add_flag("--oracle", sol.oracle, "Use the oracle solution as reference point");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Run a sweep of methods on one problem");
  b->add_option("--problem", bench.problem, "Problem JSON (synthesized when omitted)");
  b->add_option("--seed", bench.seed, "Generator seed");
  b->add_option("--dim", bench.dim, "Generator dimension")->check(CLI::PositiveNumber);
  b->add_option("--kind", bench.kind, "Generator recipe");
  b->add_option("--methods", bench.methods, "Comma-separated method list");
  b->add_option("--lambda", bench.lambda, "Step size for all methods or 'auto'");
  b->add_flag("--shared-lambda", bench.shared_lambda, "Use the smallest per-method step for all");
  b->add_option("--tol", bench.tol, "Stopping tolerance");
  b->add_option("--max-iters", bench.max_iters, "Iteration cap");
  b->add_option("--criterion", bench.criterion, "step-norm | residual | dist-to-ref");
  b->add_option("--reference", bench.reference, "known | oracle | none");
  b->add_option("--out-dir", bench.out_dir, "Directory for traces and summary.json");
  b->add_option("--format", bench.format, "csv | json");
  b->add_flag("--concurrent", bench.concurrent, "Run methods on separate threads");

  CertifyOptions cert;
  auto* c = app.add_subcommand("certify", "Probe the declared operator properties of a problem");
  c->add_option("--problem", cert.problem, "Problem JSON")->required();
  c->add_option("--samples", cert.samples, "Random pairs per probe");
  c->add_option("--seed", cert.seed, "Probe seed");
  c->add_option("--lambda", cert.lambda, "Resolvent parameter for the A probes");

  PdOptions pd;
  auto* p = app.add_subcommand("pd-solve", "Solve a composite primal-dual instance");
  p->add_option("--problem", pd.problem, "Composite problem JSON")->required();
  p->add_option("--tol", pd.tol, "Stopping tolerance");
  p->add_option("--max-iters", pd.max_iters, "Iteration cap");
  p->add_option("--criterion", pd.criterion, "step-norm | residual | dist-to-ref");
  p->add_option("--trace", pd.trace, "Trace output path");
  p->add_option("--format", pd.format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (g->parsed()) return run_gen(gen, out, *log);
    if (s->parsed()) return run_solve(sol, out, *log);
    if (b->parsed()) return run_bench(bench, out, *log);
    if (c->parsed()) return run_certify(cert, out);
    if (p->parsed()) return run_pd_solve(pd, out, *log);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const OracleFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed problem description: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace monosplit::cli
