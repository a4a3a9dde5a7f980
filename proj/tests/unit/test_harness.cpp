#include "helpers.hpp"

#include "monosplit/benchmark_runner.hpp"
#include "monosplit/cli.hpp"
#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"
#include "monosplit/serialization.hpp"
#include "monosplit/trace_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace monosplit;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("monosplit-") + info->test_suite_name() + "-" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const char* name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "monosplit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(TraceCsv, SchemaAndEmptyFields) {
  IterationTrace t;
  t.records.push_back({1, 0.5, 0.25, std::nullopt, std::nullopt, std::nullopt, 10});
  t.records.push_back({2, 0.1, 1e-300, 0.3, 1.5, 2.0, 20});
  std::ostringstream out;
  write_trace_csv(out, t);
  EXPECT_EQ(out.str(),
            "k,residual,step_norm,dist_to_ref,lyapunov,cum_c_err,wall_time_ns\n"
            "1,0.5,0.25,,,,10\n"
            "2,0.1,1e-300,0.3,1.5,2,20\n");
  std::istringstream in(out.str());
  const IterationTrace back = read_trace_csv(in);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_FALSE(back.records[0].dist_to_ref.has_value());
  EXPECT_EQ(*back.records[1].lyapunov, 1.5);
  EXPECT_EQ(back.records[1].step_norm, 1e-300);
}

TEST(TraceCsv, RoundTripsDoublesExactly) {
  IterationTrace t;
  t.records.push_back({1, 0.1 + 0.2, 1.0 / 3.0, 2.0 / 7.0, 1e-17, 123456.789, 5});
  std::ostringstream out;
  write_trace_csv(out, t);
  std::istringstream in(out.str());
  const TraceRecord r = read_trace_csv(in).records.at(0);
  EXPECT_EQ(r.residual, 0.1 + 0.2);
  EXPECT_EQ(r.step_norm, 1.0 / 3.0);
  EXPECT_EQ(*r.dist_to_ref, 2.0 / 7.0);
}

TEST(TraceJson, Shape) {
  IterationTrace t;
  t.records.push_back({1, 0.5, 0.25, std::nullopt, 1.0, std::nullopt, 10});
  std::ostringstream out;
  write_trace_json(out, t);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["columns"].size(), 7u);
  EXPECT_TRUE(j["records"][0][3].is_null());
  EXPECT_EQ(j["records"][0][4].get<double>(), 1.0);
}

TEST(RunConfig, Validation) {
  RunConfig c;
  EXPECT_THROW(c.validate(), ConfigError);
  c.methods = {"orfbs", "bogus"};
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  c.methods = {"orfbs"};
  c.tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.tol = 1e-8;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Benchmark, ThreeMethodsConverge) {
  TempDir dir;
  RunConfig c;
  c.methods = {"orfbs", "fbhfs", "sfrbs"};
  c.output_dir = dir.path();
  c.seed = 4;
  c.dim = 5;
  const BenchmarkSummary s = run_benchmark(c);
  ASSERT_EQ(s.rows.size(), 3u);
  for (const auto& r : s.rows) {
    EXPECT_TRUE(r.converged) << r.method;
    EXPECT_TRUE(fs::exists(r.trace_file)) << r.method;
  }
  EXPECT_TRUE(fs::exists(dir.path() / "summary.json"));
}

TEST(Benchmark, ConcurrentMatchesSequential) {
  TempDir dir;
  RunConfig c;
  c.methods = {"orfbs", "fbfs", "csetnek3"};
  c.dim = 6;
  c.recipe = Recipe::ball_boundary;
  c.output_dir = dir.path() / "seq";
  run_benchmark(c);
  c.output_dir = dir.path() / "par";
  c.concurrent = true;
  run_benchmark(c);
  for (const char* m : {"orfbs", "fbfs", "csetnek3"}) {
    std::istringstream a(slurp(dir.path() / "seq" / (std::string(m) + ".csv")));
    std::istringstream b(slurp(dir.path() / "par" / (std::string(m) + ".csv")));
    const auto ta = read_trace_csv(a), tb = read_trace_csv(b);
    ASSERT_EQ(ta.records.size(), tb.records.size());
    for (std::size_t i = 0; i < ta.records.size(); ++i) {
      EXPECT_EQ(ta.records[i].residual, tb.records[i].residual);
    }
  }
}

TEST(Benchmark, DivergenceRecordedAndSweepContinues) {
  TempDir dir;
  RunConfig c;
  c.methods = {"orfbs", "fbhfs"};
  c.lambda_mode = LambdaMode::fixed;
  c.lambda = 50.0;
  c.dim = 6;
  c.output_dir = dir.path();
  const BenchmarkSummary s = run_benchmark(c);
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_TRUE(s.any_diverged());
  EXPECT_TRUE(fs::exists(dir.path() / "fbhfs.csv"));
}

TEST(Benchmark, SharedLambdaIsMinimum) {
  RunConfig c;
  c.methods = {"orfbs", "fbfs", "fbhfs"};
  c.lambda_mode = LambdaMode::shared;
  const ProblemInstance p = synthesize_instance(1, 3, Recipe::affine_interior);
  const double shared = benchmark_lambda(c, Method::fbfs, p);
  for (Method m : {Method::orfbs, Method::fbfs, Method::fbhfs}) {
    EXPECT_LE(shared, default_step_size(m, p.lipschitz(), p.cocoercivity()));
  }
  EXPECT_EQ(shared, benchmark_lambda(c, Method::orfbs, p));
}

TEST(Cli, GenThenSolve) {
  TempDir dir;
  const std::string prob = dir.str("p.json");
  EXPECT_EQ(run_cli({"gen", "--seed", "1", "--dim", "4", "--kind", "affine-interior", "--out", prob}).code, 0);
  const CliRun r = run_cli({"solve", "--problem", prob, "--method", "orfbs", "--lambda", "auto",
                            "--trace", dir.str("t.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_TRUE(fs::exists(dir.path() / "t.csv"));
}

TEST(Cli, SolveWithEpsOverrides) {
  TempDir dir;
  const std::string prob = dir.str("p.json");
  run_cli({"gen", "--dim", "3", "--out", prob});
  EXPECT_EQ(run_cli({"solve", "--problem", prob, "--eps1", "0.05", "--eps2", "0.1", "--eps3", "2.5"}).code, 0);
  const CliRun bad = run_cli({"solve", "--problem", prob, "--eps1", "0.05", "--eps2", "0.1", "--eps3", "3.5"});
  EXPECT_EQ(bad.code, cli::kExitConfig);
  EXPECT_NE(bad.err.find("eps3 must lie in (2,3)"), std::string::npos);
}

TEST(Cli, UnknownMethod) {
  TempDir dir;
  const std::string prob = dir.str("p.json");
  run_cli({"gen", "--out", prob});
  EXPECT_EQ(run_cli({"solve", "--problem", prob, "--method", "bogus"}).code, cli::kExitConfig);
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"solve", "--problem", "/nonexistent/p.json"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"gen", "--kind", "weird"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"bench", "--methods", ""}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, BenchOversizedLambdaExitsTwo) {
  TempDir dir;
  const CliRun r = run_cli({"bench", "--dim", "5", "--methods", "orfbs,fbhfs", "--lambda", "100",
                            "--out-dir", dir.str("out")});
  EXPECT_EQ(r.code, cli::kExitDivergence) << r.err;
  EXPECT_NE(r.out.find("diverged"), std::string::npos);
}

TEST(Cli, SolveDivergenceExitsTwo) {
  TempDir dir;
  const std::string prob = dir.str("p.json");
  run_cli({"gen", "--dim", "5", "--out", prob});
  EXPECT_EQ(run_cli({"solve", "--problem", prob, "--lambda", "100"}).code, cli::kExitDivergence);
}

TEST(Cli, OracleFailureExitsThree) {
  // Understated Lipschitz constant on an unconstrained rotation: the oracle's
  // step size is far too large and its iterates blow up.
  TempDir dir;
  const Index n = 8;
  Matrix s = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; i += 2) {
    s(i, i + 1) = 1.0;
    s(i + 1, i) = -1.0;
  }
  const ProblemInstance p{make_zero_set_valued(n), make_skew(s),
                          make_affine(Matrix::Zero(n, n), Point::Ones(n)), std::nullopt};
  auto j = problem_to_json(p);
  j["B"]["lipschitz"] = 1e-6;
  const std::string prob = dir.str("p.json");
  write_json_file(prob, j);
  const CliRun r = run_cli({"solve", "--problem", prob, "--oracle"});
  EXPECT_EQ(r.code, cli::kExitOracle) << r.err << r.out;
}

TEST(Cli, Certify) {
  TempDir dir;
  const std::string prob = dir.str("p.json");
  run_cli({"gen", "--kind", "ball-boundary", "--dim", "3", "--out", prob});
  const CliRun r = run_cli({"certify", "--problem", prob, "--samples", "200"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["passed"].get<bool>());

  auto j = read_json_file(prob);
  j["C"]["cocoercivity"] = 100.0;
  write_json_file(prob, j);
  EXPECT_EQ(run_cli({"certify", "--problem", prob, "--samples", "200"}).code, cli::kExitConfig);
}

TEST(Cli, PdSolve) {
  TempDir dir;
  const std::string prob = dir.str("c.json");
  EXPECT_EQ(run_cli({"gen", "--kind", "composite", "--dim", "2", "--blocks", "1", "--out", prob}).code, 0);
  const CliRun r = run_cli({"pd-solve", "--problem", prob, "--tol", "1e-7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_LE(j["primal_residual"].get<double>(), 1e-7);
}
