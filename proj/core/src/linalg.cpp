#include "monosplit/linalg.hpp"

#include "monosplit/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace monosplit {

void require_dim(Index expected, Index actual, std::string_view what) {
  if (expected != actual) {
    throw ContractViolation(std::string(what) + ": dimension mismatch (expected " +
                            std::to_string(expected) + ", got " + std::to_string(actual) +
                            ")");
  }
}

void require_finite(const Point& x, std::string_view what) {
  if (!x.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite value");
  }
}

namespace linalg {

double spectral_norm(const Matrix& m, const PowerIterationOptions& opts) {
  if (m.size() == 0) return 0.0;
  const double frob = m.norm();
  if (frob == 0.0) return 0.0;

  // Fixed-seed start vector: deterministic, and almost surely not orthogonal
  // to the leading right singular vector.
  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> gauss;
  Point v(m.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  v.normalize();

  double sigma = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Point mv = m * v;
    Point w = m.transpose() * mv;
    const double wn = w.norm();
    if (wn == 0.0) break;
    const double next = std::sqrt(wn);
    v = w / wn;
    if (it > 0 && std::abs(next - sigma) <= opts.rel_tol * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return sigma;
}

bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

bool is_symmetric(const Matrix& m, double tol) {
  return is_square(m) && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_skew(const Matrix& m, double tol) {
  if (!is_square(m)) return false;
  if (m.size() == 0) return true;
  return (m + m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_symmetric_part_eigenvalue(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace linalg
}  // namespace monosplit
