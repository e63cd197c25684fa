#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "cclab/cocycle_ops.hpp"
#include "cclab/generator.hpp"
#include "cclab/operator.hpp"
#include "cclab/rates.hpp"
#include "cclab/regression.hpp"
#include "cclab/su_path.hpp"
#include "cclab/torus.hpp"

namespace cclab {

struct HolonomyResult {
  Operator H = Operator::identity(1);
  int n_used = 0;
  double cauchy_residual = 0.0;  // || step n - step n-1 || at stop
  bool converged = false;
};

namespace detail {

// Shared limit driver for the partial products (A^n_y)^{-1} A^n_x (stable,
// forward orbit) and (A^{-n}_y)^{-1} A^{-n}_x (unstable, backward orbit).
// Besides the Cauchy residual of successive partial products we track the
// theoretical tail envelope
//     E_n = ||A^(+-n)_x|| * ||(A^(+-n)_y)^{-1}|| * dist_leaf(n)^beta,
// which bounds the next increment for a Hölder generator. Convergence is
// declared when the Cauchy residual drops below tol while the envelope keeps
// decaying geometrically (ratio averaged over five steps below 0.999); ten
// consecutive envelope increases raise Diverged. The envelope is what
// separates a non-bunched constant cocycle, whose partial products are
// identically Id, from a genuinely convergent limit.
inline HolonomyResult holonomy_limit(const CocycleGenerator& A, const HyperbolicToralMap& f,
                                     const TorusPoint& x, LegType type, double t, double tol,
                                     int n_max) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  const bool forward = (type == LegType::stable);
  const int d = A.dim();
  const double beta = A.holder() ? A.holder()->beta : 1.0;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  Eigen::MatrixXd U = id, Uinv = id;  // A^(+-n)_x and its inverse
  Eigen::MatrixXd W = id, Winv = id;  // (A^(+-n)_y)^{-1} and its inverse
  Eigen::MatrixXd H_prev = id;

  LeafOrbit orbit(f, x, type, t);
  double E_prev = std::pow(std::abs(t), beta);
  int grow_count = 0;
  std::vector<double> ratios;
  ratios.reserve(8);

  Eigen::MatrixXd H = id, Hinv = id;
  double cauchy = 0.0;
  int n = 0;
  for (n = 1; n <= n_max; ++n) {
    if (forward) {
      Operator ax = A.eval(orbit.base);
      Operator ay = A.eval(orbit.companion());
      U = ax.mat() * U;
      Uinv = Uinv * ax.inv();
      W = W * ay.inv();
      Winv = ay.mat() * Winv;
      orbit.step_forward();
    } else {
      orbit.step_backward();
      Operator ax = A.eval(orbit.base);
      Operator ay = A.eval(orbit.companion());
      U = ax.inv() * U;
      Uinv = Uinv * ax.mat();
      W = W * ay.mat();
      Winv = ay.inv() * Winv;
    }
    H = W * U;
    Hinv = Uinv * Winv;
    cauchy = spectral_norm(H - H_prev);
    double E = spectral_norm(U) * spectral_norm(W) * std::pow(std::abs(orbit.offset), beta);

    grow_count = (E_prev > 0.0 && E > E_prev) ? grow_count + 1 : 0;
    if (grow_count >= 10)
      throw Diverged("holonomy tail envelope grew for 10 consecutive steps (cocycle not "
                     "fiber bunched along this leg)",
                     n);
    ratios.push_back(E_prev > 0.0 ? E / E_prev : 0.0);
    if (ratios.size() > 5) ratios.erase(ratios.begin());
    double avg = 0.0;
    for (double r : ratios) avg += r;
    avg /= static_cast<double>(ratios.size());

    if (cauchy < tol && avg < 0.999)
      return HolonomyResult{Operator::from_pair(H, Hinv), n, cauchy, true};

    H_prev = H;
    E_prev = E;
  }
  return HolonomyResult{Operator::from_pair(H, Hinv), n_max, cauchy, false};
}

}  // namespace detail

// Standard stable holonomy H^{A,s}_{x,y} = lim (A^n_y)^{-1} A^n_x for
// y = leaf_point(x, stable, t).
inline HolonomyResult stable_holonomy(const CocycleGenerator& A, const HyperbolicToralMap& f,
                                      const TorusPoint& x, double t, double tol = 1e-11,
                                      int n_max = 200) {
  return detail::holonomy_limit(A, f, x, LegType::stable, t, tol, n_max);
}

// Standard unstable holonomy H^{A,u}_{x,y} = lim (A^{-n}_y)^{-1} A^{-n}_x for
// y = leaf_point(x, unstable, t).
inline HolonomyResult unstable_holonomy(const CocycleGenerator& A, const HyperbolicToralMap& f,
                                        const TorusPoint& x, double t, double tol = 1e-11,
                                        int n_max = 200) {
  return detail::holonomy_limit(A, f, x, LegType::unstable, t, tol, n_max);
}

inline HolonomyResult leg_holonomy(const CocycleGenerator& A, const HyperbolicToralMap& f,
                                   const SuLeg& leg, double tol = 1e-11, int n_max = 200) {
  return detail::holonomy_limit(A, f, leg.start, leg.type, leg.t, tol, n_max);
}

struct AxiomReport {
  double h2_residual = 0.0;  // max composition defect over sampled triples
  double h3_residual = 0.0;  // max invariance defect over legs and 1 <= n <= n_check
  double h4_exponent = 0.0;  // log-log fit of ||H - Id|| vs leaf distance
  double h4_constant = 0.0;
  int h4_n_used = 0;
  int n_legs = 0;
};

// Checks (H2) composition along a leaf, (H3)/(H3') invariance under the
// cocycle, and fits the (H4) Hölder envelope over the supplied legs.
inline AxiomReport verify_axioms(const CocycleGenerator& A, const HyperbolicToralMap& f,
                                 const std::vector<SuLeg>& legs, int n_check,
                                 double tol = 1e-11, int n_max = 200) {
  AxiomReport rep;
  rep.n_legs = static_cast<int>(legs.size());
  std::vector<double> lx, ly;
  for (const auto& leg : legs) {
    HolonomyResult full = leg_holonomy(A, f, leg, tol, n_max);

    // (H2): split the leg at an interior point.
    double t1 = 0.375 * leg.t;
    HolonomyResult first =
        detail::holonomy_limit(A, f, leg.start, leg.type, t1, tol, n_max);
    TorusPoint mid = leaf_point(f, leg.start, leg.type, t1);
    HolonomyResult second =
        detail::holonomy_limit(A, f, mid, leg.type, leg.t - t1, tol, n_max);
    rep.h2_residual = std::max(
        rep.h2_residual, spectral_norm(second.H.mat() * first.H.mat() - full.H.mat()));

    // (H3) for stable legs, (H3') for unstable ones.
    for (int n = 1; n <= n_check; ++n) {
      std::int64_t sn = (leg.type == LegType::stable) ? n : -n;
      SuLeg moved = iterate_leg(f, leg, sn);
      HolonomyResult hmoved = leg_holonomy(A, f, moved, tol, n_max);
      Operator ax = iterate(A, f, leg.start, sn);
      Operator ay = iterate(A, f, leaf_point(f, leg.start, leg.type, leg.t), sn);
      Eigen::MatrixXd rhs = ay.inv() * hmoved.H.mat() * ax.mat();
      rep.h3_residual = std::max(rep.h3_residual, spectral_norm(full.H.mat() - rhs));
    }

    double dist = std::abs(leg.t);
    double dev = distance_to_identity(full.H);
    if (dev >= 1e-14 && dist > 0.0) {
      lx.push_back(std::log(dist));
      ly.push_back(std::log(dev));
    }
  }
  LinFit fit = least_squares(lx, ly);
  rep.h4_exponent = fit.slope;
  rep.h4_constant = std::exp(fit.intercept);
  rep.h4_n_used = fit.n;
  return rep;
}

// theta and alpha of the global Hölder estimate: theta dominates the three
// bunching quantities over the grid and alpha solves theta < (mu_hat nu)^alpha
// with a safety factor for the strict inequality.
struct AlphaRecipe {
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  double safety = 0.99;
};

inline AlphaRecipe compute_alpha(const CocycleGenerator& A, const RateData& rates, double beta,
                                 const std::vector<TorusPoint>& grid, double safety = 0.99) {
  double theta = 0.0;
  double rate_sup = 0.0;
  for (const auto& x : grid) {
    Operator a = A.eval(x);
    double K = a.norm() * a.inv_norm();
    double q1 = K * std::pow(rates.nu(x), beta);
    double q2 = K * std::pow(rates.nu_hat(x), beta);
    double q3 = std::pow(rates.nu(x) / rates.gamma(x), beta);
    theta = std::max({theta, q1, q2, q3});
    rate_sup = std::max(rate_sup, rates.mu_hat(x) * rates.nu(x));
  }
  if (theta >= 1.0) throw NotBunched("theta >= 1: cocycle is not fiber bunched on the grid");
  double alpha = safety * std::min(beta, std::log(theta) / std::log(rate_sup));
  for (const auto& x : grid)
    if (!(theta < std::pow(rates.mu_hat(x) * rates.nu(x), alpha)))
      throw NotBunched("alpha recipe violated at a grid point (rates vary too much)");
  return AlphaRecipe{theta, alpha, beta, safety};
}

// Transversal pair of stable legs: x'' = leaf_point(x, unstable, d) and both
// legs carry the same stable parameter t, so dist(x, x'') = dist(y, y'') = |d|.
struct TransversalQuadruple {
  TorusPoint x;
  double t = 0.0;  // stable leg parameter, |t| <= R
  double d = 0.0;  // unstable displacement, |d| < delta
};

struct GlobalHolderReport {
  double slope = 0.0;
  double envelope_constant = 0.0;
  bool degenerate = true;
  int n_used = 0;
};

// Regression of log d(H_{x,y}, H_{x'',y''}) against log of the transversal
// displacement over the supplied quadruples. Distances below 1e-14 are
// excluded; a constant cocycle therefore reports the degenerate flag.
inline GlobalHolderReport estimate_global_holder(const CocycleGenerator& A,
                                                 const HyperbolicToralMap& f,
                                                 const std::vector<TransversalQuadruple>& quads,
                                                 double tol = 1e-11, int n_max = 200) {
  std::vector<double> lx, ly;
  for (const auto& q : quads) {
    TorusPoint x2 = leaf_point(f, q.x, LegType::unstable, q.d);
    HolonomyResult h1 = stable_holonomy(A, f, q.x, q.t, tol, n_max);
    HolonomyResult h2 = stable_holonomy(A, f, x2, q.t, tol, n_max);
    double dd = op_distance(h1.H, h2.H);
    double delta = std::abs(q.d);
    if (dd < 1e-14 || delta <= 0.0) continue;
    lx.push_back(std::log(delta));
    ly.push_back(std::log(dd));
  }
  GlobalHolderReport rep;
  rep.n_used = static_cast<int>(lx.size());
  if (rep.n_used < 2) return rep;
  LinFit fit = least_squares(lx, ly);
  rep.slope = fit.slope;
  rep.envelope_constant = envelope_constant(lx, ly, fit.slope);
  rep.degenerate = false;
  return rep;
}

struct NormComparisonReport {
  double max_ratio = 1.0;      // max over k of ||A^k_w|| / ||A^k_z||
  double max_ratio_inv = 1.0;  // same for the inverses
  int k_max = 0;
};

// Uniform comparability of iterate norms along a stable leaf: w on W^s(z)
// at parameter t, ratios tracked for 1 <= k <= k_max.
inline NormComparisonReport norm_comparison_along_leaf(const CocycleGenerator& A,
                                                       const HyperbolicToralMap& f,
                                                       const TorusPoint& z, double t,
                                                       int k_max) {
  const int d = A.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd Pz = id, Pz_inv = id, Pw = id, Pw_inv = id;
  LeafOrbit orbit(f, z, LegType::stable, t);
  NormComparisonReport rep;
  rep.k_max = k_max;
  for (int k = 1; k <= k_max; ++k) {
    Operator az = A.eval(orbit.base);
    Operator aw = A.eval(orbit.companion());
    Pz = az.mat() * Pz;
    Pz_inv = Pz_inv * az.inv();
    Pw = aw.mat() * Pw;
    Pw_inv = Pw_inv * aw.inv();
    orbit.step_forward();
    rep.max_ratio = std::max(rep.max_ratio, spectral_norm(Pw) / spectral_norm(Pz));
    rep.max_ratio_inv =
        std::max(rep.max_ratio_inv, spectral_norm(Pw_inv) / spectral_norm(Pz_inv));
  }
  return rep;
}

}  // namespace cclab
