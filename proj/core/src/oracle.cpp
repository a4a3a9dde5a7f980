#include "monosplit/oracle.hpp"

#include "monosplit/errors.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>
#include <vector>

namespace monosplit {

using json = nlohmann::json;

namespace {

Point vec(const json& j) {
  Point p(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<Index>(i)] = j[i].get<double>();
  return p;
}

Matrix mat(const json& j) {
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  return m;
}

// 0 in N(x) + G x + g, where N is nothing, a box normal cone or w d|.|_1.
struct PiecewiseLinear {
  enum class Cone { none, box, l1 } cone = Cone::none;
  Matrix g_mat;
  Point g_vec;
  Point lo, hi;
  double weight = 0.0;
};

// Folds A(x) = scale * inner(x) + shift into `pw`. False when the family is
// not piecewise linear.
bool absorb_set_valued(const json& j, double scale, const Point& shift, PiecewiseLinear& pw) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero") {
    pw.g_vec += shift;
    return true;
  }
  if (type == "affine") {
    pw.g_mat += scale * mat(j.at("m"));
    pw.g_vec += scale * vec(j.at("b")) + shift;
    return true;
  }
  if (type == "box") {
    pw.cone = PiecewiseLinear::Cone::box;
    pw.lo = vec(j.at("lo"));
    pw.hi = vec(j.at("hi"));
    pw.g_vec += shift;
    return true;
  }
  if (type == "l1") {
    pw.cone = PiecewiseLinear::Cone::l1;
    pw.weight = scale * j.at("weight").get<double>();
    pw.g_vec += shift;
    return true;
  }
  if (type == "scaled") {
    const double s = j.at("scale").get<double>();
    return absorb_set_valued(j.at("inner"), scale * s, shift + scale * vec(j.at("shift")), pw);
  }
  return false;
}

std::optional<PiecewiseLinear> piecewise_form(const ProblemInstance& p) {
  if (!p.b.is_affine() || !p.c.is_affine()) return std::nullopt;
  json a;
  try {
    a = p.a.to_json();
  } catch (const Error&) {
    return std::nullopt;  // custom operator
  }
  const Index n = p.dim();
  PiecewiseLinear pw;
  // B + C is affine; recover G and g by evaluating at 0 and the unit vectors.
  const Point zero = Point::Zero(n);
  pw.g_vec = p.b.apply(zero) + p.c.apply(zero);
  pw.g_mat.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const Point e = Point::Unit(n, j);
    pw.g_mat.col(j) = p.b.apply(e) + p.c.apply(e) - pw.g_vec;
  }
  if (!absorb_set_valued(a, 1.0, Point::Zero(n), pw)) return std::nullopt;
  return pw;
}

// Per coordinate face states.
enum class Face { free, at_lo, at_hi, positive, negative, zero };

std::vector<Face> faces_for(const PiecewiseLinear& pw, Index j) {
  switch (pw.cone) {
    case PiecewiseLinear::Cone::none:
      return {Face::free};
    case PiecewiseLinear::Cone::box: {
      if (pw.lo[j] == pw.hi[j]) return {Face::at_lo};
      std::vector<Face> f{Face::free};
      if (std::isfinite(pw.lo[j])) f.push_back(Face::at_lo);
      if (std::isfinite(pw.hi[j])) f.push_back(Face::at_hi);
      return f;
    }
    case PiecewiseLinear::Cone::l1:
      return {Face::zero, Face::positive, Face::negative};
  }
  return {};
}

// Solves the face's linear system and checks its sign conditions.
std::optional<Point> solve_face(const PiecewiseLinear& pw, const std::vector<Face>& face) {
  const Index n = pw.g_vec.size();
  Point x = Point::Zero(n);
  std::vector<Index> unknown;
  Point target = Point::Zero(n);  // required value of (G x + g)_j on unknown rows
  for (Index j = 0; j < n; ++j) {
    switch (face[static_cast<std::size_t>(j)]) {
      case Face::at_lo: x[j] = pw.lo[j]; break;
      case Face::at_hi: x[j] = pw.hi[j]; break;
      case Face::zero: x[j] = 0.0; break;
      case Face::free: unknown.push_back(j); break;
      case Face::positive: unknown.push_back(j); target[j] = -pw.weight; break;
      case Face::negative: unknown.push_back(j); target[j] = pw.weight; break;
    }
  }

  const auto k = static_cast<Index>(unknown.size());
  if (k > 0) {
    Matrix sys(k, k);
    Point rhs(k);
    for (Index r = 0; r < k; ++r) {
      const Index row = unknown[static_cast<std::size_t>(r)];
      rhs[r] = target[row] - pw.g_vec[row] - pw.g_mat.row(row).dot(x);
      for (Index c = 0; c < k; ++c) sys(r, c) = pw.g_mat(row, unknown[static_cast<std::size_t>(c)]);
    }
    const Point sol = sys.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    if ((sys * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) return std::nullopt;
    for (Index r = 0; r < k; ++r) x[unknown[static_cast<std::size_t>(r)]] = sol[r];
  }

  const Point f = pw.g_mat * x + pw.g_vec;
  const double tol = 1e-9 * std::max(1.0, f.lpNorm<Eigen::Infinity>());
  for (Index j = 0; j < n; ++j) {
    switch (face[static_cast<std::size_t>(j)]) {
      case Face::free:
        if (pw.cone == PiecewiseLinear::Cone::box &&
            (x[j] < pw.lo[j] - tol || x[j] > pw.hi[j] + tol)) {
          return std::nullopt;
        }
        break;
      // -F_j must lie in the normal cone: (-inf, 0] at lo, [0, inf) at hi.
      case Face::at_lo:
        if (pw.lo[j] != pw.hi[j] && f[j] < -tol) return std::nullopt;
        break;
      case Face::at_hi:
        if (f[j] > tol) return std::nullopt;
        break;
      case Face::positive:
        if (x[j] < -tol) return std::nullopt;
        break;
      case Face::negative:
        if (x[j] > tol) return std::nullopt;
        break;
      case Face::zero:
        if (std::abs(f[j]) > pw.weight + tol) return std::nullopt;
        break;
    }
  }
  if (pw.cone == PiecewiseLinear::Cone::box) x = x.cwiseMax(pw.lo).cwiseMin(pw.hi);
  return x;
}

std::optional<Point> enumerate_faces(const PiecewiseLinear& pw) {
  const Index n = pw.g_vec.size();
  std::vector<std::vector<Face>> options;
  for (Index j = 0; j < n; ++j) options.push_back(faces_for(pw, j));
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<Face> face(static_cast<std::size_t>(n));
  while (true) {
    for (std::size_t j = 0; j < idx.size(); ++j) face[j] = options[j][idx[j]];
    if (auto x = solve_face(pw, face)) return x;
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == options[j].size()) idx[j++] = 0;
    if (j == idx.size()) return std::nullopt;
  }
}

double residual_at(const ProblemInstance& p, const Point& x) {
  const Point fwd = x - p.b.apply(x) - p.c.apply(x);
  return (x - p.a.resolvent(1.0, fwd)).norm();
}

// Forward-backward-half-forward: u = J(x - l(B + C)x), x+ = u + l(Bx - Bu).
OracleResult half_forward_loop(const ProblemInstance& p, Point x, const OracleOptions& opt) {
  const double L = p.lipschitz();
  const double beta = p.cocoercivity();
  double lambda = 1.0;
  if (std::isinf(beta)) {
    if (L > 0.0) lambda = 0.99 / L;
  } else {
    lambda = 0.99 * 4.0 * beta / (1.0 + std::sqrt(1.0 + 16.0 * beta * beta * L * L));
  }

  OracleResult out;
  out.route = OracleRoute::iterative;
  for (long k = 1; k <= opt.max_iters; ++k) {
    const Point bx = p.b.apply(x);
    const Point u = p.a.resolvent(lambda, x - lambda * (bx + p.c.apply(x)));
    Point next = u + lambda * (bx - p.b.apply(u));
    if (!next.allFinite()) throw OracleFailure("oracle: iterate became non-finite");
    // stableNorm: plain norm() squares first and overflows near 1e154.
    const double step = (next - x).stableNorm();
    const double scale = std::max(1.0, x.stableNorm());
    x = std::move(next);
    if (std::isfinite(step) && step <= opt.step_tol * scale) {
      out.x = std::move(x);
      out.iterations = k;
      out.residual = residual_at(p, out.x);
      return out;
    }
  }
  throw OracleFailure("oracle: no convergence within " + std::to_string(opt.max_iters) +
                      " iterations");
}

}  // namespace

OracleResult oracle_solve_detailed(const ProblemInstance& problem, const std::optional<Point>& x0,
                                   const OracleOptions& options) {
  problem.validate();
  const Index n = problem.dim();
  Point start = x0.value_or(Point::Zero(n));
  require_dim(n, start.size(), "oracle starting point");

  try {
    if (residual_at(problem, start) == 0.0) {
      return OracleResult{start, OracleRoute::trivial, 0, 0.0};
    }
    if (n <= options.max_enumeration_dim) {
      if (auto pw = piecewise_form(problem)) {
        if (auto x = enumerate_faces(*pw)) {
          const double r = residual_at(problem, *x);
          if (r <= 1e-9 * std::max(1.0, x->norm())) {
            return OracleResult{std::move(*x), OracleRoute::active_set, 0, r};
          }
        }
      }
    }
    return half_forward_loop(problem, std::move(start), options);
  } catch (const OracleFailure&) {
    throw;
  } catch (const NumericError& e) {
    throw OracleFailure(std::string("oracle: ") + e.what());
  }
}

}  // namespace monosplit
