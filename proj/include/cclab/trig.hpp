#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "cclab/torus.hpp"

namespace cclab {

// One term a cos(2 pi k.x) + b sin(2 pi k.x) with integer frequency k.
struct TrigTerm {
  int k1 = 0;
  int k2 = 0;
  double a = 0.0;
  double b = 0.0;
};

// Real trigonometric polynomial on T^2. The phase k.x is reduced mod 1
// before scaling by 2 pi, so evaluation is 1-periodic to rounding.
class TrigPolynomial {
public:
  TrigPolynomial() = default;
  TrigPolynomial(std::initializer_list<TrigTerm> terms) : terms_(terms) { finish(); }
  explicit TrigPolynomial(std::vector<TrigTerm> terms) : terms_(std::move(terms)) { finish(); }

  double operator()(const TorusPoint& x) const {
    double v = 0.0;
    for (const auto& t : terms_) {
      double phase = reduce_mod1(t.k1 * x.x1 + t.k2 * x.x2);
      double ang = 2.0 * std::numbers::pi * phase;
      if (t.a != 0.0) v += t.a * std::cos(ang);
      if (t.b != 0.0) v += t.b * std::sin(ang);
    }
    return v;
  }

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // 2 pi sum ||k||_2 (|a_k| + |b_k|), a Lipschitz constant for the gradient bound.
  double lipschitz() const { return lipschitz_; }
  // sum |a_k| + |b_k|, an upper bound for the sup norm.
  double sup_bound() const { return sup_bound_; }

private:
  void finish() {
    lipschitz_ = 0.0;
    sup_bound_ = 0.0;
    for (const auto& t : terms_) {
      double kn = std::hypot(static_cast<double>(t.k1), static_cast<double>(t.k2));
      lipschitz_ += 2.0 * std::numbers::pi * kn * (std::abs(t.a) + std::abs(t.b));
      sup_bound_ += std::abs(t.a) + std::abs(t.b);
    }
  }

  std::vector<TrigTerm> terms_;
  double lipschitz_ = 0.0;
  double sup_bound_ = 0.0;
};

}  // namespace cclab
