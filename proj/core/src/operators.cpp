#include "monosplit/operators.hpp"

#include "monosplit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace monosplit {

std::string_view to_string(SetValuedKind kind) {
  switch (kind) {
    case SetValuedKind::zero: return "zero";
    case SetValuedKind::affine: return "affine";
    case SetValuedKind::box: return "box";
    case SetValuedKind::ball: return "ball";
    case SetValuedKind::l1: return "l1";
    case SetValuedKind::scaled: return "scaled";
    case SetValuedKind::custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(SingleValuedKind kind) {
  switch (kind) {
    case SingleValuedKind::zero: return "zero";
    case SingleValuedKind::linear: return "linear";
    case SingleValuedKind::affine: return "affine";
    case SingleValuedKind::skew: return "skew";
    case SingleValuedKind::quadratic_gradient: return "quad_grad";
    case SingleValuedKind::scaled_identity: return "scaled_identity";
    case SingleValuedKind::componentwise_tanh: return "tanh";
    case SingleValuedKind::custom: return "custom";
  }
  return "unknown";
}

Point SetValuedImpl::inverse_resolvent(double lambda, const Point& x) const {
  return x - lambda * resolvent(1.0 / lambda, x / lambda);
}

nlohmann::json SetValuedImpl::to_json() const {
  throw InvalidParameter("operator family '" + std::string(to_string(kind())) +
                         "' has no JSON form");
}

nlohmann::json SingleValuedImpl::to_json() const {
  throw InvalidParameter("operator family '" + std::string(to_string(kind())) +
                         "' has no JSON form");
}

namespace {

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("resolvent parameter lambda must be positive and finite, got " +
                           std::to_string(lambda));
  }
}

}  // namespace

SetValuedOp::SetValuedOp(std::shared_ptr<const SetValuedImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw ContractViolation("SetValuedOp: null implementation");
  if (impl_->dim() < 1) throw InvalidParameter("SetValuedOp: dimension must be positive");
}

Point SetValuedOp::resolvent(double lambda, const Point& x) const {
  require_positive_lambda(lambda);
  require_dim(dim(), x.size(), "resolvent");
  require_finite(x, "resolvent input");
  Point out = impl_->resolvent(lambda, x);
  require_finite(out, "resolvent output");
  return out;
}

Point SetValuedOp::inverse_resolvent(double lambda, const Point& x) const {
  require_positive_lambda(lambda);
  require_dim(dim(), x.size(), "inverse resolvent");
  if (!impl_->has_inverse_resolvent()) {
    throw InvalidParameter("operator family '" + std::string(to_string(kind())) +
                           "' does not support inverse resolvent evaluation");
  }
  require_finite(x, "inverse resolvent input");
  Point out = impl_->inverse_resolvent(lambda, x);
  require_finite(out, "inverse resolvent output");
  return out;
}

SingleValuedOp::SingleValuedOp(std::shared_ptr<const SingleValuedImpl> impl,
                               std::optional<double> lipschitz,
                               std::optional<double> cocoercivity)
    : impl_(std::move(impl)), lipschitz_(lipschitz), cocoercivity_(cocoercivity) {
  if (!impl_) throw ContractViolation("SingleValuedOp: null implementation");
  if (impl_->dim() < 1) throw InvalidParameter("SingleValuedOp: dimension must be positive");
  if (lipschitz_ && !(*lipschitz_ >= 0.0)) {
    throw InvalidParameter("declared Lipschitz constant must be nonnegative");
  }
  if (cocoercivity_ && !(*cocoercivity_ > 0.0)) {
    throw InvalidParameter("declared cocoercivity modulus must be positive");
  }
}

Point SingleValuedOp::apply(const Point& x) const {
  require_dim(dim(), x.size(), "apply");
  Point out = impl_->apply(x);
  if (!out.allFinite()) throw NumericError("apply: non-finite operator output (overflow)");
  return out;
}

double SingleValuedOp::effective_lipschitz() const {
  if (lipschitz_) return *lipschitz_;
  if (cocoercivity_) return 1.0 / *cocoercivity_;
  return kUnbounded;
}

SingleValuedOp SingleValuedOp::with_constants(std::optional<double> lipschitz,
                                              std::optional<double> cocoercivity) const {
  return SingleValuedOp(impl_, lipschitz, cocoercivity);
}

nlohmann::json SingleValuedOp::to_json() const {
  nlohmann::json j = impl_->to_json();
  if (lipschitz_) j["lipschitz"] = *lipschitz_;
  if (cocoercivity_) {
    if (std::isinf(*cocoercivity_)) {
      j["cocoercivity"] = "inf";
    } else {
      j["cocoercivity"] = *cocoercivity_;
    }
  }
  return j;
}

bool CertReport::passed() const {
  return monotone.passed && (!lipschitz || lipschitz->passed) &&
         (!cocoercive || cocoercive->passed);
}

namespace {

nlohmann::json probe_json(const ProbeResult& r) {
  return {{"passed", r.passed}, {"worst_margin", r.worst_margin}, {"samples", r.samples}};
}

Point gaussian_point(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> gauss;
  Point p(dim);
  for (Index i = 0; i < dim; ++i) p[i] = gauss(rng);
  return p;
}

// Records a slack value normalized by `scale`.
void record(ProbeResult& r, double slack, double scale, double tol) {
  const double normalized = slack / std::max(1.0, scale);
  r.worst_margin = std::min(r.worst_margin, normalized);
  if (normalized < -tol) r.passed = false;
  ++r.samples;
}

}  // namespace

nlohmann::json CertReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["monotone"] = probe_json(monotone);
  if (lipschitz) j["lipschitz"] = probe_json(*lipschitz);
  if (cocoercive) j["cocoercive"] = probe_json(*cocoercive);
  return j;
}

CertReport certify(const SingleValuedOp& op, int n_samples, std::uint64_t seed, double tol) {
  if (n_samples < 1) throw InvalidParameter("certify: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  CertReport report;
  const auto lip = op.lipschitz();
  const auto beta = op.cocoercivity();
  if (lip) report.lipschitz.emplace();
  if (beta) report.cocoercive.emplace();

  for (int s = 0; s < n_samples; ++s) {
    const Point x = gaussian_point(rng, op.dim());
    const Point y = gaussian_point(rng, op.dim());
    const Point dx = x - y;
    const Point dt = op.apply(x) - op.apply(y);
    const double inner = dx.dot(dt);
    const double dx2 = dx.squaredNorm();
    const double dt2 = dt.squaredNorm();
    const double scale = dx2 + dt2;

    record(report.monotone, inner, scale, tol);
    if (lip) {
      record(*report.lipschitz, *lip * std::sqrt(dx2) - std::sqrt(dt2),
             std::sqrt(dx2) * std::max(1.0, *lip), tol);
    }
    if (beta) {
      // beta = inf asserts a constant map.
      const double slack = std::isinf(*beta) ? -std::sqrt(dt2) : inner - *beta * dt2;
      const double cscale = std::isinf(*beta) ? 0.0 : dx2 + *beta * dt2;
      record(*report.cocoercive, slack, cscale, tol);
    }
  }
  return report;
}

ProbeResult probe_firm_nonexpansive(const SetValuedOp& op, double lambda, int n_samples,
                                    std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  ProbeResult r;
  for (int s = 0; s < n_samples; ++s) {
    // Spread samples over a few scales so projections hit faces and corners.
    const double sx = 0.25 + 4.0 * (s % 4);
    const Point x = sx * gaussian_point(rng, op.dim());
    const Point y = sx * gaussian_point(rng, op.dim());
    const Point dj = op.resolvent(lambda, x) - op.resolvent(lambda, y);
    const double slack = (x - y).dot(dj) - dj.squaredNorm();
    record(r, slack, (x - y).squaredNorm(), tol);
  }
  return r;
}

ProbeResult probe_inverse_resolvent_identity(const SetValuedOp& op, double lambda,
                                             int n_samples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  ProbeResult r;
  for (int s = 0; s < n_samples; ++s) {
    const double sx = 0.25 + 4.0 * (s % 4);
    const Point x = sx * gaussian_point(rng, op.dim());
    const Point sum = op.resolvent(lambda, x) + lambda * op.inverse_resolvent(1.0 / lambda, x / lambda);
    const double err = (sum - x).lpNorm<Eigen::Infinity>();
    record(r, -err, x.lpNorm<Eigen::Infinity>(), tol);
  }
  return r;
}

}  // namespace monosplit
