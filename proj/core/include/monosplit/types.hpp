#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string_view>

namespace monosplit {

/// Element of the ambient space R^n. Dense, finite coordinates.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sentinel for "unbounded" constants, e.g. the cocoercivity modulus of a
/// constant map.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline bool all_finite(const Point& x) { return x.allFinite(); }

/// Throws ContractViolation when `actual != expected`.
void require_dim(Index expected, Index actual, std::string_view what);

/// Throws NumericError when `x` has a NaN or infinite coordinate.
void require_finite(const Point& x, std::string_view what);

}  // namespace monosplit
