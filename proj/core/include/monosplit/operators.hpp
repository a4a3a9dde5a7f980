#pragma once

#include "monosplit/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

namespace monosplit {

enum class SetValuedKind { zero, affine, box, ball, l1, scaled, custom };
enum class SingleValuedKind {
  zero,
  linear,
  affine,
  skew,
  quadratic_gradient,
  scaled_identity,
  componentwise_tanh,
  custom
};

std::string_view to_string(SetValuedKind kind);
std::string_view to_string(SingleValuedKind kind);

/// Backend of a maximally monotone operator. Only resolvents are exposed.
///
/// Implementations are immutable once constructed; any internal caches must be
/// safe under concurrent calls.
class SetValuedImpl {
 public:
  virtual ~SetValuedImpl() = default;

  virtual SetValuedKind kind() const = 0;
  virtual Index dim() const = 0;

  /// (I + lambda A)^{-1} x. `lambda > 0` and the shape of `x` are checked by
  /// the caller.
  virtual Point resolvent(double lambda, const Point& x) const = 0;

  virtual bool has_inverse_resolvent() const { return true; }

  /// Resolvent of A^{-1}. The default goes through the Moreau identity
  /// J_{lambda A^{-1}}(x) = x - lambda J_{A/lambda}(x / lambda); families with
  /// a closed form override it.
  virtual Point inverse_resolvent(double lambda, const Point& x) const;

  virtual nlohmann::json to_json() const;
};

/// Value handle to a shared immutable SetValuedImpl.
class SetValuedOp {
 public:
  explicit SetValuedOp(std::shared_ptr<const SetValuedImpl> impl);

  SetValuedKind kind() const { return impl_->kind(); }
  Index dim() const { return impl_->dim(); }

  /// Returns the unique p with x - p in lambda A(p).
  Point resolvent(double lambda, const Point& x) const;

  /// Resolvent of the inverse operator. Throws InvalidParameter for families
  /// whose inverse resolvent is degenerate (the zero operator).
  Point inverse_resolvent(double lambda, const Point& x) const;

  const SetValuedImpl& impl() const { return *impl_; }
  nlohmann::json to_json() const { return impl_->to_json(); }

 private:
  std::shared_ptr<const SetValuedImpl> impl_;
};

class SingleValuedImpl {
 public:
  virtual ~SingleValuedImpl() = default;

  virtual SingleValuedKind kind() const = 0;
  virtual Index dim() const = 0;
  virtual Point apply(const Point& x) const = 0;

  /// True when the map is affine (x -> Gx + g).
  virtual bool is_affine() const { return false; }
  /// True when the map is linear (affine with g = 0).
  virtual bool is_linear() const { return false; }

  virtual nlohmann::json to_json() const;
};

/// Evaluable operator together with its declared Lipschitz constant and
/// cocoercivity modulus. Declared constants are claims; `certify` probes them.
class SingleValuedOp {
 public:
  SingleValuedOp(std::shared_ptr<const SingleValuedImpl> impl,
                 std::optional<double> lipschitz,
                 std::optional<double> cocoercivity);

  SingleValuedKind kind() const { return impl_->kind(); }
  Index dim() const { return impl_->dim(); }

  /// Evaluates T x. Throws ContractViolation on shape mismatch and
  /// NumericError if the output is not finite.
  Point apply(const Point& x) const;

  std::optional<double> lipschitz() const { return lipschitz_; }
  /// May be kUnbounded for constant maps.
  std::optional<double> cocoercivity() const { return cocoercivity_; }

  /// Declared Lipschitz constant, else 1/beta from a declared cocoercivity,
  /// else kUnbounded.
  double effective_lipschitz() const;

  bool is_affine() const { return impl_->is_affine(); }
  bool is_linear() const { return impl_->is_linear(); }

  /// Same operator with different declared constants.
  SingleValuedOp with_constants(std::optional<double> lipschitz,
                                std::optional<double> cocoercivity) const;

  const SingleValuedImpl& impl() const { return *impl_; }
  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const SingleValuedImpl> impl_;
  std::optional<double> lipschitz_;
  std::optional<double> cocoercivity_;
};

inline constexpr double kProbeTolerance = 1e-9;

/// Outcome of one randomized inequality probe. `worst_margin` is the smallest
/// normalized slack seen; negative beyond tolerance means failure.
struct ProbeResult {
  bool passed = true;
  double worst_margin = kUnbounded;
  int samples = 0;
};

struct CertReport {
  ProbeResult monotone;
  std::optional<ProbeResult> lipschitz;
  std::optional<ProbeResult> cocoercive;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Samples `n_samples` Gaussian pairs and checks monotonicity plus whichever
/// of the Lipschitz / cocoercivity inequalities are declared on `op`.
CertReport certify(const SingleValuedOp& op, int n_samples, std::uint64_t seed,
                   double tol = kProbeTolerance);

/// ||Jx - Jy||^2 <= <x - y, Jx - Jy> + tol on random pairs.
ProbeResult probe_firm_nonexpansive(const SetValuedOp& op, double lambda, int n_samples,
                                    std::uint64_t seed, double tol = kProbeTolerance);

/// J_{lambda A}(x) + lambda J_{A^{-1}/lambda}(x / lambda) = x on random x.
ProbeResult probe_inverse_resolvent_identity(const SetValuedOp& op, double lambda,
                                             int n_samples, std::uint64_t seed,
                                             double tol = 1e-10);

}  // namespace monosplit
