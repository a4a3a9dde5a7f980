#include "monosplit/product_space.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"
#include "monosplit/linalg.hpp"
#include "monosplit/serialization.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace monosplit {

using json = nlohmann::json;

namespace {

std::string block_name(std::size_t i, const char* what) {
  return "block " + std::to_string(i) + ": " + what;
}

double nu(const CompositeBlock& blk) {
  if (blk.d_inv.kind() == SingleValuedKind::zero) return 0.0;
  return blk.d_inv.effective_lipschitz();
}

double mu(const CompositeBlock& blk) {
  if (blk.c_inv.kind() == SingleValuedKind::zero) return kUnbounded;
  return blk.c_inv.cocoercivity().value_or(0.0);
}

double primal_lipschitz(const CompositeProblem& p) {
  if (p.b.kind() == SingleValuedKind::zero) return 0.0;
  return p.b.effective_lipschitz();
}

double primal_cocoercivity(const CompositeProblem& p) {
  if (p.c.kind() == SingleValuedKind::zero) return kUnbounded;
  return p.c.cocoercivity().value_or(0.0);
}

void check_lifted(const CompositeProblem& problem, const LiftedPoint& p) {
  require_dim(problem.dim(), p.x.size(), "lifted point: primal block");
  if (p.v.size() != problem.blocks.size()) {
    throw ContractViolation("lifted point: expected " + std::to_string(problem.blocks.size()) +
                            " dual blocks, got " + std::to_string(p.v.size()));
  }
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    require_dim(problem.blocks[i].dim(), p.v[i].size(), "lifted point: dual block");
  }
}

// Lifted operators for the generic solver. They hold their own copy of the
// (immutable, handle-based) problem.

class LiftedM final : public SetValuedImpl {
 public:
  explicit LiftedM(std::shared_ptr<const CompositeProblem> p) : p_(std::move(p)) {}
  SetValuedKind kind() const override { return SetValuedKind::custom; }
  Index dim() const override { return p_->lifted_dim(); }
  bool has_inverse_resolvent() const override { return false; }
  Point resolvent(double lambda, const Point& x) const override {
    return flatten(lifted_resolvent(*p_, lambda, unflatten(*p_, x)));
  }

 private:
  std::shared_ptr<const CompositeProblem> p_;
};

class LiftedQ final : public SingleValuedImpl {
 public:
  explicit LiftedQ(std::shared_ptr<const CompositeProblem> p) : p_(std::move(p)) {}
  SingleValuedKind kind() const override { return SingleValuedKind::custom; }
  Index dim() const override { return p_->lifted_dim(); }
  Point apply(const Point& x) const override {
    return flatten(lifted_apply_q(*p_, unflatten(*p_, x)));
  }

 private:
  std::shared_ptr<const CompositeProblem> p_;
};

class LiftedR final : public SingleValuedImpl {
 public:
  explicit LiftedR(std::shared_ptr<const CompositeProblem> p) : p_(std::move(p)) {}
  SingleValuedKind kind() const override { return SingleValuedKind::custom; }
  Index dim() const override { return p_->lifted_dim(); }
  Point apply(const Point& x) const override {
    return flatten(lifted_apply_r(*p_, unflatten(*p_, x)));
  }

 private:
  std::shared_ptr<const CompositeProblem> p_;
};

}  // namespace

Index CompositeProblem::lifted_dim() const {
  Index n = dim();
  for (const auto& blk : blocks) n += blk.dim();
  return n;
}

void CompositeProblem::validate() const {
  if (blocks.empty()) throw InvalidParameter("composite problem: needs at least one dual block");
  const Index n = dim();
  require_dim(n, b.dim(), "composite problem: B");
  require_dim(n, c.dim(), "composite problem: C");
  require_dim(n, z.size(), "composite problem: z");
  if (!std::isfinite(primal_lipschitz(*this))) {
    throw InvalidParameter("composite problem: B needs a declared Lipschitz constant");
  }
  if (!(primal_cocoercivity(*this) > 0.0)) {
    throw InvalidParameter("composite problem: C needs a declared cocoercivity modulus");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& blk = blocks[i];
    const Index g = blk.dim();
    require_dim(g, blk.d_inv.dim(), block_name(i, "D_i^{-1}"));
    require_dim(g, blk.c_inv.dim(), block_name(i, "C_i^{-1}"));
    require_dim(g, blk.r.size(), block_name(i, "r_i"));
    require_dim(g, blk.l.rows(), block_name(i, "rows of L_i"));
    require_dim(n, blk.l.cols(), block_name(i, "columns of L_i"));
    if (blk.l.isZero(0.0)) throw InvalidParameter(block_name(i, "L_i must be nonzero"));
    if (!blk.b.impl().has_inverse_resolvent()) {
      throw InvalidParameter(block_name(i, "B_i has no implementable inverse resolvent (zero family)"));
    }
    if (!std::isfinite(nu(blk))) {
      throw InvalidParameter(block_name(i, "D_i^{-1} needs a declared Lipschitz constant"));
    }
    if (!(mu(blk) > 0.0)) {
      throw InvalidParameter(block_name(i, "C_i^{-1} needs a declared cocoercivity modulus"));
    }
  }
  if (known_x) require_dim(n, known_x->size(), "composite problem: known primal solution");
  if (known_v) {
    if (known_v->size() != blocks.size()) {
      throw ContractViolation("composite problem: known dual solution has wrong block count");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      require_dim(blocks[i].dim(), (*known_v)[i].size(), block_name(i, "known dual solution"));
    }
  }
}

LiftedPoint zero_lifted(const CompositeProblem& problem) {
  LiftedPoint p{Point::Zero(problem.dim()), {}};
  for (const auto& blk : problem.blocks) p.v.push_back(Point::Zero(blk.dim()));
  return p;
}

Point flatten(const LiftedPoint& p) {
  Index total = p.x.size();
  for (const auto& vi : p.v) total += vi.size();
  Point out(total);
  out.head(p.x.size()) = p.x;
  Index off = p.x.size();
  for (const auto& vi : p.v) {
    out.segment(off, vi.size()) = vi;
    off += vi.size();
  }
  return out;
}

LiftedPoint unflatten(const CompositeProblem& problem, const Point& flat) {
  require_dim(problem.lifted_dim(), flat.size(), "flattened lifted point");
  LiftedPoint p{flat.head(problem.dim()), {}};
  Index off = problem.dim();
  for (const auto& blk : problem.blocks) {
    p.v.emplace_back(flat.segment(off, blk.dim()));
    off += blk.dim();
  }
  return p;
}

AggregateConstants aggregate_constants(const CompositeProblem& problem) {
  double l_max = primal_lipschitz(problem);
  double beta = primal_cocoercivity(problem);
  double coupling_sq = 0.0;
  for (const auto& blk : problem.blocks) {
    l_max = std::max(l_max, nu(blk));
    beta = std::min(beta, mu(blk));
    const double ln = linalg::spectral_norm(blk.l);
    coupling_sq += ln * ln;
  }
  return {l_max + std::sqrt(coupling_sq), beta};
}

LiftedPoint lifted_apply_q(const CompositeProblem& problem, const LiftedPoint& p) {
  check_lifted(problem, p);
  LiftedPoint out{problem.b.apply(p.x), {}};
  out.v.reserve(p.v.size());
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    const auto& blk = problem.blocks[i];
    out.x += blk.l.transpose() * p.v[i];
    out.v.push_back(-(blk.l * p.x) + blk.d_inv.apply(p.v[i]));
  }
  return out;
}

LiftedPoint lifted_apply_r(const CompositeProblem& problem, const LiftedPoint& p) {
  check_lifted(problem, p);
  LiftedPoint out{problem.c.apply(p.x), {}};
  out.v.reserve(p.v.size());
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    out.v.push_back(problem.blocks[i].c_inv.apply(p.v[i]));
  }
  return out;
}

LiftedPoint lifted_resolvent(const CompositeProblem& problem, double lambda,
                             const LiftedPoint& p) {
  check_lifted(problem, p);
  LiftedPoint out{problem.a.resolvent(lambda, p.x + lambda * problem.z), {}};
  out.v.reserve(p.v.size());
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    const auto& blk = problem.blocks[i];
    out.v.push_back(blk.b.inverse_resolvent(lambda, p.v[i] - lambda * blk.r));
  }
  return out;
}

ProblemInstance lift(const CompositeProblem& problem) {
  problem.validate();
  auto shared = std::make_shared<const CompositeProblem>(problem);
  const AggregateConstants k = aggregate_constants(problem);
  std::optional<double> r_lip;
  if (std::isfinite(k.cocoercivity)) r_lip = 1.0 / k.cocoercivity;
  ProblemInstance out{SetValuedOp(std::make_shared<LiftedM>(shared)),
                      SingleValuedOp(std::make_shared<LiftedQ>(shared), k.lipschitz, std::nullopt),
                      SingleValuedOp(std::make_shared<LiftedR>(shared), r_lip, k.cocoercivity),
                      std::nullopt};
  if (problem.known_x && problem.known_v) {
    out.known_solution = flatten(LiftedPoint{*problem.known_x, *problem.known_v});
  }
  return out;
}

PrimalDualState initial_primal_dual_state(const CompositeProblem& problem,
                                          const LiftedPoint& init) {
  check_lifted(problem, init);
  return PrimalDualState{init, init, 0};
}

PrimalDualState primal_dual_step(const PrimalDualState& s, const CompositeProblem& problem,
                                 double lambda) {
  check_lifted(problem, s.curr);
  check_lifted(problem, s.prev);
  const Point& x = s.curr.x;
  const Point& x_prev = s.prev.x;

  Point coupled = problem.b.apply(x);
  Point coupled_prev = problem.b.apply(x_prev);
  for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
    coupled += problem.blocks[i].l.transpose() * s.curr.v[i];
    coupled_prev += problem.blocks[i].l.transpose() * s.prev.v[i];
  }

  PrimalDualState next{{}, s.curr, s.k + 1};
  next.curr.x = problem.a.resolvent(
                    lambda, x + lambda * problem.z - lambda * coupled - lambda * problem.c.apply(x)) -
                lambda * (coupled - coupled_prev);

  for (std::size_t i = 0; i < problem.blocks.size(); ++i) {
    const auto& blk = problem.blocks[i];
    const Point& v = s.curr.v[i];
    const Point dual = -(blk.l * x) + blk.d_inv.apply(v);
    const Point dual_prev = -(blk.l * x_prev) + blk.d_inv.apply(s.prev.v[i]);
    next.curr.v.push_back(
        blk.b.inverse_resolvent(lambda, v - lambda * blk.r - lambda * dual - lambda * blk.c_inv.apply(v)) -
        lambda * (dual - dual_prev));
  }
  return next;
}

PrimalDualResult primal_dual_solve(const CompositeProblem& problem, const StoppingRule& stop,
                                   const LiftedPoint& init) {
  stop.validate();
  const ProblemInstance lifted = lift(problem);
  check_lifted(problem, init);
  const AggregateConstants k = aggregate_constants(problem);

  PrimalDualResult out;
  out.plan = plan_step_size(k.lipschitz, k.cocoercivity);
  StoppingRule rule = stop;
  if (rule.criterion == StopCriterion::residual) {
    rule.tol = stop.tol * std::min(out.plan.lambda, 1.0);
  }
  SolveResult r = solve(lifted, Method::orfbs, out.plan, rule, flatten(init));
  LiftedPoint sol = unflatten(problem, r.x);
  out.x = std::move(sol.x);
  out.v = std::move(sol.v);
  out.trace = std::move(r.trace);
  out.converged = r.converged;
  out.iterations = r.iterations;
  return out;
}

double ResidualReport::max() const {
  double m = primal;
  for (double d : dual) m = std::max(m, d);
  return m;
}

ResidualReport check_residuals(const CompositeProblem& problem, const Point& x,
                               const std::vector<Point>& v, double lambda_probe) {
  if (!(lambda_probe > 0.0) || !std::isfinite(lambda_probe)) {
    throw InvalidParameter("check_residuals: lambda_probe must be positive and finite");
  }
  const LiftedPoint p{x, v};
  check_lifted(problem, p);
  const double mu_p = lambda_probe;

  Point drift = problem.z - problem.b.apply(x) - problem.c.apply(x);
  for (std::size_t i = 0; i < v.size(); ++i) drift -= problem.blocks[i].l.transpose() * v[i];

  ResidualReport rep;
  rep.primal = (x - problem.a.resolvent(mu_p, x + mu_p * drift)).norm();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& blk = problem.blocks[i];
    const Point arg = blk.l * x - blk.r - blk.d_inv.apply(v[i]) - blk.c_inv.apply(v[i]);
    rep.dual.push_back((v[i] - blk.b.inverse_resolvent(mu_p, v[i] + mu_p * arg)).norm());
  }
  return rep;
}

CompositeProblem synthesize_composite(std::uint64_t seed, Index n, Index m) {
  if (n < 1) throw InvalidParameter("synthesize_composite: n must be >= 1");
  if (m < 1) throw InvalidParameter("synthesize_composite: m must be >= 1");
  detail::Sampler rng(seed);

  Point lo(n), hi(n);
  for (Index i = 0; i < n; ++i) {
    lo[i] = -1.0 - rng.uniform(0.0, 1.0);
    hi[i] = 1.0 + rng.uniform(0.0, 1.0);
  }
  const Point x_star = rng.uniform_point(n, -0.5, 0.5);
  const Matrix skew = rng.skew(n, rng.uniform(0.2, 1.0));
  const Matrix q = rng.spd(n, rng.uniform(0.2, 1.0));

  CompositeProblem p{make_box_normal_cone(lo, hi), make_skew(skew),
                     make_quadratic_gradient(q, Point::Zero(n)), Point::Zero(n), {}, x_star,
                     std::vector<Point>{}};

  // Box interior: A x* = {0}, so z = B x* + C x* + sum L_i^T v_i*.
  Point z = skew * x_star + q * x_star;
  for (Index i = 0; i < m; ++i) {
    const Index g = 1 + static_cast<Index>(rng.uniform(0.0, 1.0) * static_cast<double>(n)) % n;
    const double w = rng.uniform(0.5, 2.0);
    Point v_star(g), y_b(g);
    for (Index j = 0; j < g; ++j) {
      if (rng.bernoulli(0.3)) {
        // On the face of [-w, w]: B_i^{-1} v* contains t sign(v*_j), t > 0.
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        v_star[j] = sign * w;
        y_b[j] = sign * rng.uniform(0.2, 1.0);
      } else {
        v_star[j] = rng.uniform(-0.5 * w, 0.5 * w);
        y_b[j] = 0.0;
      }
    }
    const Matrix d_skew = rng.skew(g, rng.uniform(0.2, 1.0));
    const Matrix c_q = rng.spd(g, rng.uniform(0.5, 1.5));
    const Matrix l = rng.gaussian_matrix(g, n) / std::sqrt(static_cast<double>(n));

    CompositeBlock blk{make_l1_subdifferential(g, w), make_skew(d_skew),
                       make_quadratic_gradient(c_q, Point::Zero(g)), l, Point()};
    blk.r = l * x_star - y_b - d_skew * v_star - c_q * v_star;
    z += l.transpose() * v_star;
    p.blocks.push_back(std::move(blk));
    p.known_v->push_back(v_star);
  }
  p.z = z;
  p.validate();
  return p;
}

json composite_to_json(const CompositeProblem& problem) {
  json j;
  j["dim"] = problem.dim();
  j["A"] = problem.a.to_json();
  j["B"] = problem.b.to_json();
  j["C"] = problem.c.to_json();
  j["z"] = point_to_json(problem.z);
  json blocks = json::array();
  for (const auto& blk : problem.blocks) {
    blocks.push_back({{"Bi", blk.b.to_json()},
                      {"Di_inv", blk.d_inv.to_json()},
                      {"Ci_inv", blk.c_inv.to_json()},
                      {"Li", matrix_to_json(blk.l)},
                      {"ri", point_to_json(blk.r)}});
  }
  j["blocks"] = std::move(blocks);
  if (problem.known_x && problem.known_v) {
    json v = json::array();
    for (const auto& vi : *problem.known_v) v.push_back(point_to_json(vi));
    j["known_solution"] = {{"x", point_to_json(*problem.known_x)}, {"v", std::move(v)}};
  }
  return j;
}

CompositeProblem composite_from_json(const json& j) {
  if (!j.is_object()) throw InvalidParameter("composite problem must be a JSON object");
  for (const char* key : {"A", "B", "C", "z", "blocks"}) {
    if (!j.contains(key)) throw InvalidParameter(std::string("composite problem: missing '") + key + "'");
  }
  std::optional<Index> dim;
  if (j.contains("dim")) dim = j["dim"].get<Index>();
  SetValuedOp a = set_valued_from_json(j["A"], dim);
  dim = a.dim();
  CompositeProblem p{a, single_valued_from_json(j["B"], dim), single_valued_from_json(j["C"], dim),
                     point_from_json(j["z"]), {}, std::nullopt, std::nullopt};
  if (!j["blocks"].is_array()) throw InvalidParameter("composite problem: 'blocks' must be an array");
  for (const auto& jb : j["blocks"]) {
    for (const char* key : {"Bi", "Di_inv", "Ci_inv", "Li", "ri"}) {
      if (!jb.contains(key)) throw InvalidParameter(std::string("composite block: missing '") + key + "'");
    }
    Point r = point_from_json(jb["ri"]);
    const Index g = r.size();
    p.blocks.push_back(CompositeBlock{set_valued_from_json(jb["Bi"], g),
                                      single_valued_from_json(jb["Di_inv"], g),
                                      single_valued_from_json(jb["Ci_inv"], g),
                                      matrix_from_json(jb["Li"]), std::move(r)});
  }
  if (j.contains("known_solution") && !j["known_solution"].is_null()) {
    const json& ks = j["known_solution"];
    p.known_x = point_from_json(ks.at("x"));
    std::vector<Point> v;
    for (const auto& vi : ks.at("v")) v.push_back(point_from_json(vi));
    p.known_v = std::move(v);
  }
  p.validate();
  return p;
}

}  // namespace monosplit
