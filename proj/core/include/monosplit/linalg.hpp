#pragma once

#include "monosplit/types.hpp"

namespace monosplit::linalg {

struct PowerIterationOptions {
  double rel_tol = 1e-10;
  int max_iters = 10'000;
};

/// Largest singular value of `m`, by power iteration on m^T m.
double spectral_norm(const Matrix& m, const PowerIterationOptions& opts = {});

bool is_square(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol);
bool is_skew(const Matrix& m, double tol);

/// Smallest eigenvalue of the symmetric part (m + m^T)/2.
double min_symmetric_part_eigenvalue(const Matrix& m);

/// Largest eigenvalue of a symmetric matrix.
double max_eigenvalue(const Matrix& symmetric);

}  // namespace monosplit::linalg
