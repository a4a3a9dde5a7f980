#pragma once

#include "monosplit/operators.hpp"
#include "monosplit/problem.hpp"

#include <atomic>
#include <initializer_list>
#include <memory>

namespace monosplit::testing {

inline Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Wrappers that count evaluations of the wrapped operator.

class CountingSingle final : public SingleValuedImpl {
 public:
  CountingSingle(SingleValuedOp inner, std::shared_ptr<std::atomic<int>> calls)
      : inner_(std::move(inner)), calls_(std::move(calls)) {}
  SingleValuedKind kind() const override { return SingleValuedKind::custom; }
  Index dim() const override { return inner_.dim(); }
  Point apply(const Point& x) const override {
    ++*calls_;
    return inner_.apply(x);
  }
  bool is_affine() const override { return inner_.is_affine(); }
  bool is_linear() const override { return inner_.is_linear(); }

 private:
  SingleValuedOp inner_;
  std::shared_ptr<std::atomic<int>> calls_;
};

class CountingSet final : public SetValuedImpl {
 public:
  CountingSet(SetValuedOp inner, std::shared_ptr<std::atomic<int>> calls)
      : inner_(std::move(inner)), calls_(std::move(calls)) {}
  SetValuedKind kind() const override { return SetValuedKind::custom; }
  Index dim() const override { return inner_.dim(); }
  Point resolvent(double lambda, const Point& x) const override {
    ++*calls_;
    return inner_.resolvent(lambda, x);
  }

 private:
  SetValuedOp inner_;
  std::shared_ptr<std::atomic<int>> calls_;
};

struct Counters {
  std::shared_ptr<std::atomic<int>> a = std::make_shared<std::atomic<int>>(0);
  std::shared_ptr<std::atomic<int>> b = std::make_shared<std::atomic<int>>(0);
  std::shared_ptr<std::atomic<int>> c = std::make_shared<std::atomic<int>>(0);

  void reset() { *a = *b = *c = 0; }
};

/// Same problem, every operator call counted.
inline ProblemInstance counted(const ProblemInstance& p, const Counters& n) {
  return ProblemInstance{
      SetValuedOp(std::make_shared<CountingSet>(p.a, n.a)),
      SingleValuedOp(std::make_shared<CountingSingle>(p.b, n.b), p.b.lipschitz(),
                     p.b.cocoercivity()),
      SingleValuedOp(std::make_shared<CountingSingle>(p.c, n.c), p.c.lipschitz(),
                     p.c.cocoercivity()),
      p.known_solution};
}

}  // namespace monosplit::testing
