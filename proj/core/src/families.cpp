#include "monosplit/families.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/linalg.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace monosplit {
namespace {

using json = nlohmann::json;

json to_json_vec(const Point& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json_mat(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

void require_finite_matrix(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw InvalidParameter(std::string(what) + ": non-finite entries");
}

void require_square(const Matrix& m, std::string_view what) {
  if (!linalg::is_square(m) || m.rows() < 1) {
    throw InvalidParameter(std::string(what) + ": matrix must be square and nonempty");
  }
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// ---------------------------------------------------------------- set-valued

class ZeroSetValued final : public SetValuedImpl {
 public:
  explicit ZeroSetValued(Index dim) : dim_(dim) {}
  SetValuedKind kind() const override { return SetValuedKind::zero; }
  Index dim() const override { return dim_; }
  Point resolvent(double, const Point& x) const override { return x; }
  bool has_inverse_resolvent() const override { return false; }
  json to_json() const override { return {{"type", "zero"}, {"dim", dim_}}; }

 private:
  Index dim_;
};

class AffineMonotone final : public SetValuedImpl {
 public:
  AffineMonotone(Matrix m, Point b) : m_(std::move(m)), b_(std::move(b)) {}

  SetValuedKind kind() const override { return SetValuedKind::affine; }
  Index dim() const override { return m_.rows(); }

  // (I + lambda M) p = x - lambda b
  Point resolvent(double lambda, const Point& x) const override {
    return factor(lambda, /*inverse=*/false).solve(x - lambda * b_);
  }

  // p = M (x - p)/lambda + b  <=>  (M + lambda I) p = M x + lambda b
  Point inverse_resolvent(double lambda, const Point& x) const override {
    return factor(lambda, /*inverse=*/true).solve(m_ * x + lambda * b_);
  }

  json to_json() const override {
    return {{"type", "affine"}, {"m", to_json_mat(m_)}, {"b", to_json_vec(b_)}};
  }

 private:
  using Lu = Eigen::FullPivLU<Matrix>;

  const Lu& factor(double lambda, bool inverse) const {
    std::lock_guard lock(mutex_);
    auto& cache = inverse ? inverse_cache_ : cache_;
    auto it = cache.find(lambda);
    if (it != cache.end()) return *it->second;
    const Index n = m_.rows();
    Matrix sys = inverse ? Matrix(m_ + lambda * Matrix::Identity(n, n))
                         : Matrix(Matrix::Identity(n, n) + lambda * m_);
    auto lu = std::make_unique<Lu>(sys);
    if (!lu->isInvertible()) {
      throw NumericError("affine resolvent: singular system for a monotone operator");
    }
    return *cache.emplace(lambda, std::move(lu)).first->second;
  }

  Matrix m_;
  Point b_;
  // Entries are never erased, so returned references stay valid.
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<Lu>> cache_;
  mutable std::map<double, std::unique_ptr<Lu>> inverse_cache_;
};

class BoxNormalCone final : public SetValuedImpl {
 public:
  BoxNormalCone(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}
  SetValuedKind kind() const override { return SetValuedKind::box; }
  Index dim() const override { return lo_.size(); }

  Point resolvent(double, const Point& x) const override { return x.cwiseMax(lo_).cwiseMin(hi_); }

  // Prox of lambda * support function of the box.
  Point inverse_resolvent(double lambda, const Point& x) const override {
    Point out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      if (x[i] > lambda * hi_[i]) {
        out[i] = x[i] - lambda * hi_[i];
      } else if (x[i] < lambda * lo_[i]) {
        out[i] = x[i] - lambda * lo_[i];
      } else {
        out[i] = 0.0;
      }
    }
    return out;
  }

  json to_json() const override {
    return {{"type", "box"}, {"lo", to_json_vec(lo_)}, {"hi", to_json_vec(hi_)}};
  }

 private:
  Point lo_, hi_;
};

class BallNormalCone final : public SetValuedImpl {
 public:
  BallNormalCone(Point center, double radius) : c_(std::move(center)), r_(radius) {}
  SetValuedKind kind() const override { return SetValuedKind::ball; }
  Index dim() const override { return c_.size(); }

  Point resolvent(double, const Point& x) const override {
    const Point d = x - c_;
    const double n = d.norm();
    if (n <= r_) return x;
    return c_ + (r_ / n) * d;
  }

  // Prox of lambda * (<c, .> + r ||.||): block soft-threshold of x - lambda c.
  Point inverse_resolvent(double lambda, const Point& x) const override {
    const Point d = x - lambda * c_;
    const double n = d.norm();
    if (n <= lambda * r_) return Point::Zero(x.size());
    return (1.0 - lambda * r_ / n) * d;
  }

  json to_json() const override {
    return {{"type", "ball"}, {"center", to_json_vec(c_)}, {"radius", r_}};
  }

 private:
  Point c_;
  double r_;
};

class L1Subdifferential final : public SetValuedImpl {
 public:
  L1Subdifferential(Index dim, double weight) : dim_(dim), w_(weight) {}
  SetValuedKind kind() const override { return SetValuedKind::l1; }
  Index dim() const override { return dim_; }

  Point resolvent(double lambda, const Point& x) const override {
    const double t = lambda * w_;
    return x.unaryExpr([t](double v) { return soft_threshold(v, t); });
  }

  // A^{-1} is the normal cone of [-w, w]^n, independent of lambda.
  Point inverse_resolvent(double, const Point& x) const override {
    return x.cwiseMax(-w_).cwiseMin(w_);
  }

  json to_json() const override { return {{"type", "l1"}, {"dim", dim_}, {"weight", w_}}; }

 private:
  Index dim_;
  double w_;
};

class ScaledSetValued final : public SetValuedImpl {
 public:
  ScaledSetValued(SetValuedOp inner, double scale, Point shift)
      : inner_(std::move(inner)), s_(scale), shift_(std::move(shift)) {}
  SetValuedKind kind() const override { return SetValuedKind::scaled; }
  Index dim() const override { return inner_.dim(); }

  Point resolvent(double lambda, const Point& x) const override {
    return inner_.resolvent(lambda * s_, x - lambda * shift_);
  }

  bool has_inverse_resolvent() const override { return inner_.impl().has_inverse_resolvent(); }

  // (s A + c)^{-1}(u) = A^{-1}((u - c)/s)
  Point inverse_resolvent(double lambda, const Point& x) const override {
    return shift_ + s_ * inner_.inverse_resolvent(lambda / s_, (x - shift_) / s_);
  }

  json to_json() const override {
    return {{"type", "scaled"}, {"inner", inner_.to_json()}, {"scale", s_},
            {"shift", to_json_vec(shift_)}};
  }

 private:
  SetValuedOp inner_;
  double s_;
  Point shift_;
};

// -------------------------------------------------------------- single-valued

class ZeroMap final : public SingleValuedImpl {
 public:
  explicit ZeroMap(Index dim) : dim_(dim) {}
  SingleValuedKind kind() const override { return SingleValuedKind::zero; }
  Index dim() const override { return dim_; }
  Point apply(const Point& x) const override { return Point::Zero(x.size()); }
  bool is_affine() const override { return true; }
  bool is_linear() const override { return true; }
  json to_json() const override { return {{"type", "zero"}, {"dim", dim_}}; }

 private:
  Index dim_;
};

class AffineMap final : public SingleValuedImpl {
 public:
  AffineMap(SingleValuedKind kind, Matrix m, Point b)
      : kind_(kind), m_(std::move(m)), b_(std::move(b)) {}
  SingleValuedKind kind() const override { return kind_; }
  Index dim() const override { return m_.rows(); }
  Point apply(const Point& x) const override {
    Point out = m_ * x;
    if (has_offset()) out += b_;
    return out;
  }
  bool is_affine() const override { return true; }
  bool is_linear() const override { return !has_offset(); }

  json to_json() const override {
    json j{{"type", to_string(kind_)}};
    j[kind_ == SingleValuedKind::quadratic_gradient ? "q" : "m"] = to_json_mat(m_);
    if (kind_ == SingleValuedKind::affine || kind_ == SingleValuedKind::quadratic_gradient) {
      j["b"] = to_json_vec(b_);
    }
    return j;
  }

 private:
  bool has_offset() const {
    return kind_ == SingleValuedKind::affine || kind_ == SingleValuedKind::quadratic_gradient;
  }

  SingleValuedKind kind_;
  Matrix m_;
  Point b_;
};

class ScaledIdentity final : public SingleValuedImpl {
 public:
  ScaledIdentity(Index dim, double factor) : dim_(dim), f_(factor) {}
  SingleValuedKind kind() const override { return SingleValuedKind::scaled_identity; }
  Index dim() const override { return dim_; }
  Point apply(const Point& x) const override { return f_ * x; }
  bool is_affine() const override { return true; }
  bool is_linear() const override { return true; }
  json to_json() const override {
    return {{"type", "scaled_identity"}, {"dim", dim_}, {"factor", f_}};
  }

 private:
  Index dim_;
  double f_;
};

class ComponentwiseTanh final : public SingleValuedImpl {
 public:
  ComponentwiseTanh(double scale, Point b) : s_(scale), b_(std::move(b)) {}
  SingleValuedKind kind() const override { return SingleValuedKind::componentwise_tanh; }
  Index dim() const override { return b_.size(); }
  Point apply(const Point& x) const override {
    return s_ * x.array().tanh().matrix() + b_;
  }
  json to_json() const override {
    return {{"type", "tanh"}, {"scale", s_}, {"b", to_json_vec(b_)}};
  }

 private:
  double s_;
  Point b_;
};

void require_vector_dim(const Point& v, Index n, std::string_view what) {
  if (v.size() != n) {
    throw InvalidParameter(std::string(what) + ": vector has length " +
                           std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
  if (!v.allFinite()) throw InvalidParameter(std::string(what) + ": non-finite entries");
}

void require_positive_dim(Index dim) {
  if (dim < 1) throw InvalidParameter("dimension must be positive");
}

// Lipschitz and cocoercivity of x -> M x (+ b).
std::pair<std::optional<double>, std::optional<double>> linear_constants(const Matrix& m) {
  const double lip = linalg::spectral_norm(m);
  std::optional<double> beta;
  if (lip == 0.0) {
    beta = kUnbounded;
  } else if (linalg::is_symmetric(m, kSymmetryTol) &&
             linalg::min_symmetric_part_eigenvalue(m) >= -kMonotoneEigTol) {
    beta = 1.0 / linalg::max_eigenvalue(m);
  }
  return {lip, beta};
}

}  // namespace

SetValuedOp make_zero_set_valued(Index dim) {
  require_positive_dim(dim);
  return SetValuedOp(std::make_shared<ZeroSetValued>(dim));
}

SetValuedOp make_affine_monotone(Matrix m, Point b) {
  require_square(m, "affine operator");
  require_finite_matrix(m, "affine operator");
  require_vector_dim(b, m.rows(), "affine operator offset");
  if (linalg::min_symmetric_part_eigenvalue(m) < -kMonotoneEigTol) {
    throw InvalidParameter("affine operator: symmetric part of M is not positive semidefinite");
  }
  return SetValuedOp(std::make_shared<AffineMonotone>(std::move(m), std::move(b)));
}

SetValuedOp make_box_normal_cone(Point lo, Point hi) {
  require_positive_dim(lo.size());
  require_vector_dim(hi, lo.size(), "box upper bound");
  if (lo.hasNaN()) throw InvalidParameter("box lower bound: NaN entries");
  for (Index i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {
      throw InvalidParameter("box: lo > hi in coordinate " + std::to_string(i));
    }
  }
  return SetValuedOp(std::make_shared<BoxNormalCone>(std::move(lo), std::move(hi)));
}

SetValuedOp make_ball_normal_cone(Point center, double radius) {
  require_positive_dim(center.size());
  require_vector_dim(center, center.size(), "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParameter("ball: radius must be positive and finite");
  }
  return SetValuedOp(std::make_shared<BallNormalCone>(std::move(center), radius));
}

SetValuedOp make_l1_subdifferential(Index dim, double weight) {
  require_positive_dim(dim);
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InvalidParameter("l1: weight must be positive and finite");
  }
  return SetValuedOp(std::make_shared<L1Subdifferential>(dim, weight));
}

SetValuedOp make_scaled(SetValuedOp inner, double scale, Point shift) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidParameter("scaled operator: scale must be positive and finite");
  }
  require_vector_dim(shift, inner.dim(), "scaled operator shift");
  return SetValuedOp(std::make_shared<ScaledSetValued>(std::move(inner), scale, std::move(shift)));
}

SingleValuedOp make_zero_map(Index dim) {
  require_positive_dim(dim);
  return SingleValuedOp(std::make_shared<ZeroMap>(dim), 0.0, kUnbounded);
}

SingleValuedOp make_linear(Matrix m) {
  require_square(m, "linear operator");
  require_finite_matrix(m, "linear operator");
  auto [lip, beta] = linear_constants(m);
  const Index n = m.rows();
  return SingleValuedOp(
      std::make_shared<AffineMap>(SingleValuedKind::linear, std::move(m), Point::Zero(n)), lip,
      beta);
}

SingleValuedOp make_affine(Matrix m, Point b) {
  require_square(m, "affine map");
  require_finite_matrix(m, "affine map");
  require_vector_dim(b, m.rows(), "affine map offset");
  auto [lip, beta] = linear_constants(m);
  return SingleValuedOp(
      std::make_shared<AffineMap>(SingleValuedKind::affine, std::move(m), std::move(b)), lip,
      beta);
}

SingleValuedOp make_skew(Matrix m) {
  require_square(m, "skew operator");
  require_finite_matrix(m, "skew operator");
  if (!linalg::is_skew(m, kSymmetryTol)) {
    throw InvalidParameter("skew operator: M + M^T != 0");
  }
  const double lip = linalg::spectral_norm(m);
  std::optional<double> beta;
  if (lip == 0.0) beta = kUnbounded;
  const Index n = m.rows();
  return SingleValuedOp(
      std::make_shared<AffineMap>(SingleValuedKind::skew, std::move(m), Point::Zero(n)), lip,
      beta);
}

SingleValuedOp make_quadratic_gradient(Matrix q, Point b) {
  require_square(q, "quadratic gradient");
  require_finite_matrix(q, "quadratic gradient");
  require_vector_dim(b, q.rows(), "quadratic gradient offset");
  if (!linalg::is_symmetric(q, kSymmetryTol)) {
    throw InvalidParameter("quadratic gradient: Q is not symmetric");
  }
  if (linalg::min_symmetric_part_eigenvalue(q) < -kMonotoneEigTol) {
    throw InvalidParameter("quadratic gradient: Q is not positive semidefinite");
  }
  const double lmax = std::max(0.0, linalg::max_eigenvalue(q));
  const double beta = lmax > 0.0 ? 1.0 / lmax : kUnbounded;
  return SingleValuedOp(std::make_shared<AffineMap>(SingleValuedKind::quadratic_gradient,
                                                    std::move(q), std::move(b)),
                        lmax, beta);
}

SingleValuedOp make_scaled_identity(Index dim, double factor) {
  require_positive_dim(dim);
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw InvalidParameter("scaled identity: factor must be nonnegative and finite");
  }
  const double beta = factor > 0.0 ? 1.0 / factor : kUnbounded;
  return SingleValuedOp(std::make_shared<ScaledIdentity>(dim, factor), factor, beta);
}

SingleValuedOp make_componentwise_tanh(double scale, Point b) {
  require_positive_dim(b.size());
  require_vector_dim(b, b.size(), "tanh offset");
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidParameter("tanh: scale must be nonnegative and finite");
  }
  const double beta = scale > 0.0 ? 1.0 / scale : kUnbounded;
  return SingleValuedOp(std::make_shared<ComponentwiseTanh>(scale, std::move(b)), scale, beta);
}

}  // namespace monosplit
