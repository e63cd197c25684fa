#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

#include "cclab/errors.hpp"

namespace cclab {

// A point of T^2 stored by its fundamental-domain representative in [0,1)^2.
struct TorusPoint {
  double x1 = 0.0;
  double x2 = 0.0;

  friend bool operator==(const TorusPoint& a, const TorusPoint& b) {
    return a.x1 == b.x1 && a.x2 == b.x2;
  }
  friend bool operator!=(const TorusPoint& a, const TorusPoint& b) { return !(a == b); }
};

// Direction in the universal cover R^2.
struct Vec2 {
  double a = 0.0;
  double b = 0.0;

  double norm() const { return std::hypot(a, b); }
  double dot(const Vec2& o) const { return a * o.a + b * o.b; }
  Vec2 scaled(double s) const { return {s * a, s * b}; }
};

inline double reduce_mod1(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r -= 1.0;  // floor of a tiny negative rounds the difference up to 1.0
  if (r < 0.0) r += 1.0;
  return r;
}

inline TorusPoint reduce(const TorusPoint& p) {
  return {reduce_mod1(p.x1), reduce_mod1(p.x2)};
}

inline TorusPoint translate(const TorusPoint& p, const Vec2& v, double t) {
  return reduce({p.x1 + t * v.a, p.x2 + t * v.b});
}

// Flat metric on T^2: minimum over the 9 adjacent lifts.
inline double torus_dist(const TorusPoint& p, const TorusPoint& q) {
  double best = std::numeric_limits<double>::infinity();
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy) {
      double u = q.x1 + dx - p.x1;
      double v = q.x2 + dy - p.x2;
      double d2 = u * u + v * v;
      if (d2 < best) best = d2;
    }
  return std::sqrt(best);
}

// Lift of q - p with smallest Euclidean norm.
inline Vec2 torus_diff(const TorusPoint& p, const TorusPoint& q) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 r{0.0, 0.0};
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy) {
      double u = q.x1 + dx - p.x1;
      double v = q.x2 + dy - p.x2;
      double d2 = u * u + v * v;
      if (d2 < best) {
        best = d2;
        r = {u, v};
      }
    }
  return r;
}

enum class LegType { stable, unstable };

inline const char* leg_type_name(LegType t) {
  return t == LegType::stable ? "stable" : "unstable";
}

// Hyperbolic automorphism of T^2 given by an integer matrix with |det| = 1
// and no eigenvalue on the unit circle. Eigen-data is kept explicit: leaves
// of W^u / W^s are straight lines along v_u / v_s, and a leaf offset t is
// multiplied by the signed eigenvalue under one application of the map.
struct HyperbolicToralMap {
  std::array<std::array<std::int64_t, 2>, 2> m{{{0, 0}, {0, 0}}};
  std::array<std::array<std::int64_t, 2>, 2> m_inv{{{0, 0}, {0, 0}}};
  int det = 1;
  double lambda = 0.0;  // unstable eigenvalue modulus, > 1
  double eig_u = 0.0;   // signed eigenvalues: |eig_u| = lambda,
  double eig_s = 0.0;   // |eig_s| = 1/lambda
  Vec2 v_u{};
  Vec2 v_s{};

  const Vec2& direction(LegType t) const { return t == LegType::stable ? v_s : v_u; }
  double signed_eigenvalue(LegType t) const { return t == LegType::stable ? eig_s : eig_u; }
};

namespace detail {

inline Vec2 eigenvector_for(const std::array<std::array<std::int64_t, 2>, 2>& m, double e) {
  // Rows of (M - eI) are both orthogonal complements of the eigenvector;
  // pick the candidate with the larger norm for conditioning.
  Vec2 c1{static_cast<double>(m[0][1]), e - static_cast<double>(m[0][0])};
  Vec2 c2{e - static_cast<double>(m[1][1]), static_cast<double>(m[1][0])};
  Vec2 v = (c1.norm() >= c2.norm()) ? c1 : c2;
  double n = v.norm();
  v = v.scaled(1.0 / n);
  // Deterministic sign: first component of appreciable size positive.
  if (v.a < -1e-8 || (std::abs(v.a) <= 1e-8 && v.b < 0.0)) v = v.scaled(-1.0);
  return v;
}

}  // namespace detail

inline HyperbolicToralMap make_toral_map(std::int64_t a, std::int64_t b, std::int64_t c,
                                         std::int64_t d) {
  HyperbolicToralMap f;
  f.m = {{{a, b}, {c, d}}};
  std::int64_t det = a * d - b * c;
  if (det != 1 && det != -1)
    throw NotUnimodular("determinant is " + std::to_string(det) + ", expected +1 or -1");
  f.det = static_cast<int>(det);
  // Exact inverse: det * adj(M).
  f.m_inv = {{{det * d, -det * b}, {-det * c, det * a}}};

  std::int64_t tr = a + d;
  std::int64_t disc = tr * tr - 4 * det;
  // Unit-circle eigenvalues, decided in exact integer arithmetic:
  // disc <= 0 gives complex or repeated +-1 roots; a root at +-1 means
  // the characteristic polynomial vanishes there.
  if (disc <= 0 || (1 - tr + det) == 0 || (1 + tr + det) == 0)
    throw NotHyperbolic("matrix has an eigenvalue of modulus 1");

  double sq = std::sqrt(static_cast<double>(disc));
  double trd = static_cast<double>(tr);
  // Larger-modulus root without cancellation, then the cofactor.
  double big = (trd >= 0.0) ? (trd + sq) / 2.0 : (trd - sq) / 2.0;
  double small = static_cast<double>(det) / big;
  f.eig_u = big;
  f.eig_s = small;
  f.lambda = std::abs(big);
  f.v_u = detail::eigenvector_for(f.m, f.eig_u);
  f.v_s = detail::eigenvector_for(f.m, f.eig_s);

  // Consistency of the eigen-data (1e-12 residual contract).
  for (int which = 0; which < 2; ++which) {
    const Vec2& v = which == 0 ? f.v_u : f.v_s;
    double e = which == 0 ? f.eig_u : f.eig_s;
    double r1 = static_cast<double>(a) * v.a + static_cast<double>(b) * v.b - e * v.a;
    double r2 = static_cast<double>(c) * v.a + static_cast<double>(d) * v.b - e * v.b;
    if (std::hypot(r1, r2) > 1e-12)
      throw NotHyperbolic("eigenvector residual above tolerance");
  }
  return f;
}

inline HyperbolicToralMap make_toral_map(const std::array<std::int64_t, 4>& rowmajor) {
  return make_toral_map(rowmajor[0], rowmajor[1], rowmajor[2], rowmajor[3]);
}

inline TorusPoint apply_step(const HyperbolicToralMap& f, const TorusPoint& p) {
  double a = static_cast<double>(f.m[0][0]) * p.x1 + static_cast<double>(f.m[0][1]) * p.x2;
  double b = static_cast<double>(f.m[1][0]) * p.x1 + static_cast<double>(f.m[1][1]) * p.x2;
  return reduce({a, b});
}

inline TorusPoint apply_step_inv(const HyperbolicToralMap& f, const TorusPoint& p) {
  double a = static_cast<double>(f.m_inv[0][0]) * p.x1 + static_cast<double>(f.m_inv[0][1]) * p.x2;
  double b = static_cast<double>(f.m_inv[1][0]) * p.x1 + static_cast<double>(f.m_inv[1][1]) * p.x2;
  return reduce({a, b});
}

// f^n, iterated stepwise with reduction after every arithmetic step. Series
// evaluators rely on the orbit of f(x) coinciding bitwise with the shifted
// orbit of x, which the stepwise scheme guarantees.
inline TorusPoint apply(const HyperbolicToralMap& f, TorusPoint p, std::int64_t n = 1) {
  if (n >= 0) {
    for (std::int64_t k = 0; k < n; ++k) p = apply_step(f, p);
  } else {
    for (std::int64_t k = 0; k < -n; ++k) p = apply_step_inv(f, p);
  }
  return p;
}

// The point on W^{leg}(x) at signed leaf parameter t.
inline TorusPoint leaf_point(const HyperbolicToralMap& f, const TorusPoint& x, LegType type,
                             double t) {
  return translate(x, f.direction(type), t);
}

// Decompose the minimal lift of y - x in the eigenbasis: returns (coefficient
// along the requested leaf direction, coefficient along the transversal one).
inline std::pair<double, double> leaf_offset(const HyperbolicToralMap& f, const TorusPoint& x,
                                             const TorusPoint& y, LegType type) {
  Vec2 d = torus_diff(x, y);
  // Solve [v_u | v_s] (s, t)^T = d by Cramer's rule.
  double det = f.v_u.a * f.v_s.b - f.v_s.a * f.v_u.b;
  double s = (d.a * f.v_s.b - f.v_s.a * d.b) / det;
  double t = (f.v_u.a * d.b - d.a * f.v_u.b) / det;
  if (type == LegType::stable) return {t, s};
  return {s, t};
}

}  // namespace cclab
