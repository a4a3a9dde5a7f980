#pragma once

// Random draws used by the instance generators. Internal to core/.

#include "monosplit/linalg.hpp"
#include "monosplit/types.hpp"

#include <random>

namespace monosplit::detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double gaussian() { return std::normal_distribution<double>()(rng_); }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  Point uniform_point(Index n, double lo, double hi) {
    Point p(n);
    for (Index i = 0; i < n; ++i) p[i] = uniform(lo, hi);
    return p;
  }
  Point gaussian_point(Index n) {
    Point p(n);
    for (Index i = 0; i < n; ++i) p[i] = gaussian();
    return p;
  }
  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = gaussian();
    return m;
  }

  /// Unit vector, uniform on the sphere.
  Point direction(Index n) {
    Point d = gaussian_point(n);
    while (d.norm() == 0.0) d = gaussian_point(n);
    return d.normalized();
  }

  /// Skew matrix with spectral norm `norm` (zero when n == 1).
  Matrix skew(Index n, double norm) {
    const Matrix g = gaussian_matrix(n, n);
    Matrix s = g - g.transpose();
    const double sn = linalg::spectral_norm(s);
    if (sn > 0.0) s *= norm / sn;
    return s;
  }

  /// Symmetric positive definite H H^T / n + shift I. Exactly symmetric.
  Matrix spd(Index n, double shift) {
    const Matrix h = gaussian_matrix(n, n);
    Matrix q = h * h.transpose() / static_cast<double>(n);
    q = 0.5 * (q + q.transpose()).eval();
    q.diagonal().array() += shift;
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace monosplit::detail
