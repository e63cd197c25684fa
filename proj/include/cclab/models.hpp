#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cclab/conjugacy.hpp"
#include "cclab/errors.hpp"
#include "cclab/generator.hpp"
#include "cclab/operator.hpp"
#include "cclab/regression.hpp"
#include "cclab/su_path.hpp"
#include "cclab/torus.hpp"
#include "cclab/trig.hpp"

namespace cclab {

// Triangular (de la Llave-type) pair over a hyperbolic toral automorphism:
//   A(x) = [[mu, phi(x)], [0, 1]],   B = diag(mu, 1),   mu = lambda^r.
// The scalar reduction is the twisted coboundary equation
// c(fx) = mu c(x) + phi(x), solved by c(x) = -sum mu^{-k-1} phi(f^k x);
// C(x) = [[1, c(x)], [0, 1]] conjugates B to A. Closed-form series for the
// stable/unstable holonomy offsets come with truncation tail bounds.
struct TriangularPair {
  HyperbolicToralMap f;
  double r = 0.5;
  double mu = 0.0;
  TrigPolynomial phi;
  int n_trunc_c = 60;  // truncation for c and h^s
  int n_trunc_u = 80;  // truncation for h^u
  CocycleGenerator A;
  CocycleGenerator B;

  double c_tail_bound() const {
    return phi.sup_bound() * std::pow(mu, -(n_trunc_c + 1)) / (1.0 - 1.0 / mu);
  }

  // c(x) from the forward orbit of x, truncated at n_trunc_c.
  double oracle_c(const TorusPoint& x) const {
    double sum = 0.0, w = 1.0 / mu;
    TorusPoint p = reduce(x);
    for (int k = 0; k <= n_trunc_c; ++k) {
      sum -= w * phi(p);
      w /= mu;
      p = apply_step(f, p);
    }
    return sum;
  }

  // h^s(x, y) for y = leaf_point(x, stable, t): the companion orbit is kept
  // as an analytic leaf offset, which evaluates c at the true leaf point.
  double oracle_hs(const TorusPoint& x, double t) const {
    double sum = 0.0, w = 1.0 / mu;
    LeafOrbit orbit(f, reduce(x), LegType::stable, t);
    for (int k = 0; k <= n_trunc_c; ++k) {
      sum += w * (phi(orbit.base) - phi(orbit.companion()));
      w /= mu;
      orbit.step_forward();
    }
    return sum;
  }

  // c evaluated at leaf_point(x, stable, t) along the synchronized orbit;
  // term-wise, oracle_hs(x, t) = oracle_c_at_stable_leaf - oracle_c(x) ... up
  // to summation order.
  double oracle_c_at_stable_leaf(const TorusPoint& x, double t) const {
    double sum = 0.0, w = 1.0 / mu;
    LeafOrbit orbit(f, reduce(x), LegType::stable, t);
    for (int k = 0; k <= n_trunc_c; ++k) {
      sum -= w * phi(orbit.companion());
      w /= mu;
      orbit.step_forward();
    }
    return sum;
  }

  // h^u(x, y) for y = leaf_point(x, unstable, t), from the backward orbit.
  double oracle_hu(const TorusPoint& x, double t) const {
    double sum = 0.0, w = 1.0;
    LeafOrbit orbit(f, reduce(x), LegType::unstable, t);
    for (int j = 1; j <= n_trunc_u; ++j) {
      orbit.step_backward();
      sum += w * (phi(orbit.companion()) - phi(orbit.base));
      w *= mu;
    }
    return sum;
  }

  Eigen::Matrix2d unipotent(double offdiag) const {
    Eigen::Matrix2d m;
    m << 1.0, offdiag, 0.0, 1.0;
    return m;
  }

  ConjugacyField conjugacy() const {
    TriangularPair self = *this;
    return ConjugacyField::closed_form(TorusPoint{0.0, 0.0}, [self](const TorusPoint& x) {
      return Operator::from_matrix(self.unipotent(self.oracle_c(x)));
    });
  }
};

inline TriangularPair triangular_family(const HyperbolicToralMap& f, double r,
                                        const TrigPolynomial& phi, int n_trunc_c = 60,
                                        int n_trunc_u = 80) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0, 1)");
  if (phi.sup_bound() > 1.0)
    throw std::invalid_argument("phi must satisfy ||phi||_inf <= 1");
  TriangularPair pair;
  pair.f = f;
  pair.r = r;
  pair.mu = std::pow(f.lambda, r);
  pair.phi = phi;
  pair.n_trunc_c = n_trunc_c;
  pair.n_trunc_u = n_trunc_u;
  double mu = pair.mu;
  TrigPolynomial p = phi;
  pair.A = CocycleGenerator::closed_form(
      2,
      [mu, p](const TorusPoint& x) {
        Eigen::Matrix2d m;
        m << mu, p(x), 0.0, 1.0;
        return Eigen::MatrixXd(m);
      },
      HolderData{1.0, p.lipschitz()});
  Eigen::Matrix2d b;
  b << mu, 0.0, 0.0, 1.0;
  pair.B = CocycleGenerator::constant(b);
  return pair;
}

// Pair built generatively from the cohomological equation:
// A(x) = C(fx) B(x) C(x)^{-1}, so the residual vanishes by construction and
// any smooth C intertwines the standard holonomies.
struct SmoothConjugatePair {
  CocycleGenerator A;
  CocycleGenerator B;
  ConjugacyField C;
};

inline SmoothConjugatePair smooth_conjugate_pair(const CocycleGenerator& B,
                                                 const ConjugacyField& C,
                                                 const HyperbolicToralMap& f) {
  // Reject singular conjugacy specs early on a coarse validation grid.
  for (const auto& x : uniform_grid(64)) {
    try {
      C.eval(x);
    } catch (const SingularProduct&) {
      throw SingularConjugacy("conjugacy spec is singular near a validation grid point");
    }
  }
  CocycleGenerator A = CocycleGenerator::closed_form(
      B.dim(),
      [B, C, f](const TorusPoint& x) {
        Operator cf = C.eval(apply_step(f, x));
        Operator cx = C.eval(x);
        return Eigen::MatrixXd(cf.mat() * B.eval_mat(x) * cx.inv());
      },
      B.holder());
  return SmoothConjugatePair{std::move(A), B, C};
}

// The default smooth pair: B = diag(lambda^r, 1) and C a rotation by
// amp * sin(2 pi x1).
inline SmoothConjugatePair standard_smooth_pair(const HyperbolicToralMap& f, double r = 0.5,
                                                double amp = 0.3) {
  double mu = std::pow(f.lambda, r);
  Eigen::Matrix2d b;
  b << mu, 0.0, 0.0, 1.0;
  ConjugacyField C =
      ConjugacyField::closed_form(TorusPoint{0.0, 0.0}, [amp](const TorusPoint& x) {
        double ang = amp * std::sin(2.0 * std::numbers::pi * x.x1);
        Eigen::Matrix2d m;
        m << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
        return Operator::from_matrix(m);
      });
  return smooth_conjugate_pair(CocycleGenerator::constant(b), C, f);
}

// Dominated splitting of a two-dimensional cocycle, fast/slow projective
// line fields with the measured per-step domination ratio.
struct Splitting2D {
  std::function<Vec2(TorusPoint)> E_fast;
  std::function<Vec2(TorusPoint)> E_slow;
  double gap = 0.0;
};

struct PerturbedConstant {
  CocycleGenerator B;
  Splitting2D splitting;
};

namespace detail {

inline Vec2 normalize_sign(Vec2 v) {
  double n = v.norm();
  v = v.scaled(1.0 / n);
  if (v.a < 0.0 || (v.a == 0.0 && v.b < 0.0)) v = v.scaled(-1.0);
  return v;
}

inline double projective_dist(const Vec2& a, const Vec2& b) {
  double dot = std::abs(a.dot(b));
  return std::sqrt(std::max(0.0, 1.0 - dot * dot));
}

// Projective power iteration from depth n with Cauchy control via doubling.
inline Vec2 projective_limit(const std::function<Vec2(const TorusPoint&, int)>& push,
                             const TorusPoint& x, double tol, int n_max) {
  Vec2 prev = push(x, 8);
  for (int n = 16; n <= n_max; n *= 2) {
    Vec2 cur = push(x, n);
    if (projective_dist(cur, prev) < tol) return cur;
    prev = cur;
  }
  throw NoDominatedSplitting("projective iteration failed to Cauchy-converge within n_max");
}

}  // namespace detail

// B(x) = A0 + eps P(x) for a constant A0 with distinct eigenvalue moduli.
// E_fast(x) is the limit of forward images B^n_{f^{-n}x} of a generic line,
// E_slow(x) the limit of backward images (B^n_x)^{-1} of one; the gap is the
// minimal per-step expansion ratio between the two fields over the grid.
inline PerturbedConstant perturbed_constant(const Eigen::Matrix2d& a0,
                                            const CocycleGenerator& P, double eps,
                                            const HyperbolicToralMap& f,
                                            double proj_tol = 1e-10, int n_max = 200,
                                            int grid_n = 24) {
  if (P.dim() != 2) throw DimensionMismatch("perturbation generator must be 2x2");
  Eigen::EigenSolver<Eigen::Matrix2d> es(a0);
  double m0 = std::abs(es.eigenvalues()(0));
  double m1 = std::abs(es.eigenvalues()(1));
  if (std::abs(m0 - m1) < 1e-12 * std::max(m0, m1))
    throw std::invalid_argument("A0 must have distinct eigenvalue moduli");

  CocycleGenerator B = CocycleGenerator::closed_form(
      2,
      [a0, P, eps](const TorusPoint& x) {
        return Eigen::MatrixXd(a0 + eps * P.eval_mat(x));
      },
      P.holder());

  auto push_fast = [B, f](const TorusPoint& x, int n) {
    std::vector<TorusPoint> back(static_cast<std::size_t>(n));
    TorusPoint p = x;
    for (int k = 0; k < n; ++k) {
      p = apply_step_inv(f, p);
      back[static_cast<std::size_t>(k)] = p;  // back[k] = f^{-(k+1)} x
    }
    Eigen::Vector2d u(0.6, 0.8);
    for (int k = n - 1; k >= 0; --k) {
      u = B.eval_mat(back[static_cast<std::size_t>(k)]) * u;
      u.normalize();
    }
    return detail::normalize_sign(Vec2{u(0), u(1)});
  };
  auto push_slow = [B, f](const TorusPoint& x, int n) {
    std::vector<TorusPoint> fwd(static_cast<std::size_t>(n));
    TorusPoint p = x;
    for (int k = 0; k < n; ++k) {
      fwd[static_cast<std::size_t>(k)] = p;  // fwd[k] = f^k x
      p = apply_step(f, p);
    }
    Eigen::Vector2d u(0.6, 0.8);
    for (int k = n - 1; k >= 0; --k) {
      u = Eigen::Matrix2d(B.eval_mat(fwd[static_cast<std::size_t>(k)])).inverse() * u;
      u.normalize();
    }
    return detail::normalize_sign(Vec2{u(0), u(1)});
  };

  Splitting2D split;
  split.E_fast = [push_fast, proj_tol, n_max](TorusPoint x) {
    return detail::projective_limit(push_fast, reduce(x), proj_tol, n_max);
  };
  split.E_slow = [push_slow, proj_tol, n_max](TorusPoint x) {
    return detail::projective_limit(push_slow, reduce(x), proj_tol, n_max);
  };

  double gap = std::numeric_limits<double>::infinity();
  for (const auto& x : uniform_grid(grid_n)) {
    Eigen::Matrix2d bx = B.eval_mat(x);
    Vec2 vf = split.E_fast(x), vs = split.E_slow(x);
    double ef = (bx * Eigen::Vector2d(vf.a, vf.b)).norm();
    double es2 = (bx * Eigen::Vector2d(vs.a, vs.b)).norm();
    gap = std::min(gap, ef / es2);
  }
  split.gap = gap;
  return PerturbedConstant{std::move(B), std::move(split)};
}

// Max over a grid of the angular defect between B(x) E_i(x) and E_i(fx).
inline double splitting_invariance_residual(const PerturbedConstant& model,
                                            const HyperbolicToralMap& f, int grid_n = 16) {
  double worst = 0.0;
  for (const auto& x : uniform_grid(grid_n)) {
    Eigen::Matrix2d bx = model.B.eval_mat(x);
    TorusPoint fx = apply_step(f, x);
    for (int which = 0; which < 2; ++which) {
      Vec2 v = which == 0 ? model.splitting.E_fast(x) : model.splitting.E_slow(x);
      Vec2 w = which == 0 ? model.splitting.E_fast(fx) : model.splitting.E_slow(fx);
      Eigen::Vector2d img = bx * Eigen::Vector2d(v.a, v.b);
      img.normalize();
      worst = std::max(worst, detail::projective_dist(Vec2{img(0), img(1)}, w));
    }
  }
  return worst;
}

// Scalar restriction B|_{E_i} as a one-dimensional cocycle: B(x) v_i(x) is
// parallel to v_i(fx), and the signed factor is the 1x1 generator entry.
inline CocycleGenerator restrict_to_line(const PerturbedConstant& model,
                                         const HyperbolicToralMap& f, bool fast) {
  auto B = model.B;
  auto field = fast ? model.splitting.E_fast : model.splitting.E_slow;
  return CocycleGenerator::closed_form(
      1,
      [B, f, field](const TorusPoint& x) {
        Vec2 v = field(x);
        Vec2 w = field(apply_step(f, x));
        Eigen::Vector2d img = Eigen::Matrix2d(B.eval_mat(x)) * Eigen::Vector2d(v.a, v.b);
        double s = img.dot(Eigen::Vector2d(w.a, w.b));
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = s;
        return m;
      },
      B.holder());
}

// Median over base points of the log-log regression slope of
// |c(leaf_point(x, type, t)) - c(x)| against |t|.
inline double leaf_holder_of_c(const TriangularPair& pair, LegType type,
                               const std::vector<TorusPoint>& xs,
                               const std::vector<double>& ts) {
  std::vector<double> slopes;
  for (const auto& x : xs) {
    std::vector<double> lx, ly;
    double cx = pair.oracle_c(x);
    for (double t : ts) {
      double cy = pair.oracle_c(leaf_point(pair.f, x, type, t));
      double diff = std::abs(cy - cx);
      if (diff < 1e-13) continue;
      lx.push_back(std::log(std::abs(t)));
      ly.push_back(std::log(diff));
    }
    if (lx.size() >= 3) slopes.push_back(least_squares(lx, ly).slope);
  }
  if (slopes.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(slopes.begin(), slopes.end());
  return slopes[slopes.size() / 2];
}

// Measured Hölder exponent of the conjugacy along unstable leaves; the
// shipped r = 1/2 family lands near ln(mu)/ln(lambda) = r.
inline double unstable_holder_of_c(const TriangularPair& pair,
                                   const std::vector<TorusPoint>& xs,
                                   const std::vector<double>& ts) {
  return leaf_holder_of_c(pair, LegType::unstable, xs, ts);
}

}  // namespace cclab
