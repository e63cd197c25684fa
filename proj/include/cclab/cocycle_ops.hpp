#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cclab/generator.hpp"
#include "cclab/operator.hpp"
#include "cclab/rates.hpp"
#include "cclab/regression.hpp"
#include "cclab/torus.hpp"

namespace cclab {

// Cocycle iterate A^n_x = A(f^{n-1}x) ... A(x) for n >= 0, and
// A^{-n}_x = A(f^{-n}x)^{-1} ... A(f^{-1}x)^{-1}, accumulated as a running
// (P, P^{-1}) pair of factor matrices and cached factor inverses.
inline Operator iterate(const CocycleGenerator& A, const HyperbolicToralMap& f, TorusPoint x,
                        std::int64_t n) {
  const int d = A.dim();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd Pinv = P;
  if (n >= 0) {
    for (std::int64_t k = 0; k < n; ++k) {
      Operator a = A.eval(x);
      P = a.mat() * P;
      Pinv = Pinv * a.inv();
      x = apply_step(f, x);
    }
  } else {
    for (std::int64_t k = 0; k < -n; ++k) {
      x = apply_step_inv(f, x);
      Operator a = A.eval(x);
      P = P * a.inv();
      Pinv = a.mat() * Pinv;
    }
  }
  return Operator::from_pair(P, Pinv);
}

// K_A(x, n) = ||A^n_x|| * ||(A^n_x)^{-1}|| >= 1; equals 1 iff conformal.
inline double quasiconformal_distortion(const CocycleGenerator& A, const HyperbolicToralMap& f,
                                        const TorusPoint& x, std::int64_t n) {
  Operator it = iterate(A, f, x, n);
  return it.norm() * it.inv_norm();
}

struct BunchingReport {
  bool pointwise_ok = false;
  double worst_product = 0.0;
  double theta_hat = 0.0;
  double L_hat = 1.0;
  int n_used = 0;
};

// Pointwise fiber bunching: ||A(x)|| ||A(x)^{-1}|| nu(x)^beta < 1 and the
// same with nu_hat, at every grid point.
inline BunchingReport check_fiber_bunching(const CocycleGenerator& A, const RateData& rates,
                                           double beta, const std::vector<TorusPoint>& grid) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  BunchingReport rep;
  rep.worst_product = 0.0;
  for (const auto& x : grid) {
    Operator a = A.eval(x);
    double K = a.norm() * a.inv_norm();
    double p = K * std::max(std::pow(rates.nu(x), beta), std::pow(rates.nu_hat(x), beta));
    rep.worst_product = std::max(rep.worst_product, p);
  }
  rep.pointwise_ok = rep.worst_product < 1.0;
  rep.theta_hat = rep.worst_product;
  rep.L_hat = 1.0;
  rep.n_used = 1;
  return rep;
}

// Weak fiber bunching: fit L theta^n to the worst-case products
// ||A^n_x|| ||(A^n_x)^{-1}|| (nu^n_x)^beta (forward) and the corresponding
// backward branch with nu_hat, by least squares on logs over n = 1..n_max.
// The fit passes when theta_hat stays below 1 by the 0.02 slope margin.
inline BunchingReport check_weak_fiber_bunching(const CocycleGenerator& A,
                                                const HyperbolicToralMap& f,
                                                const RateData& rates, double beta,
                                                int n_max,
                                                const std::vector<TorusPoint>& grid) {
  if (n_max < 8) throw std::invalid_argument("n_max must be at least 8");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  const int d = A.dim();
  std::vector<double> worst(static_cast<std::size_t>(n_max), 0.0);
  for (const auto& x0 : grid) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d), Pinv = P;
    Eigen::MatrixXd Q = P, Qinv = P;
    TorusPoint xf = x0, xb = x0;
    double nu_prod = 1.0, nu_hat_prod = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      Operator af = A.eval(xf);
      nu_prod *= rates.nu(xf);
      P = af.mat() * P;
      Pinv = Pinv * af.inv();
      xf = apply_step(f, xf);

      xb = apply_step_inv(f, xb);
      Operator ab = A.eval(xb);
      nu_hat_prod *= rates.nu_hat(xb);
      Q = Q * ab.inv();
      Qinv = ab.mat() * Qinv;

      double fwd = spectral_norm(P) * spectral_norm(Pinv) * std::pow(nu_prod, beta);
      double bwd = spectral_norm(Q) * spectral_norm(Qinv) * std::pow(nu_hat_prod, beta);
      worst[static_cast<std::size_t>(n - 1)] =
          std::max({worst[static_cast<std::size_t>(n - 1)], fwd, bwd});
    }
  }
  std::vector<double> ns, logs;
  ns.reserve(worst.size());
  logs.reserve(worst.size());
  for (int n = 1; n <= n_max; ++n) {
    ns.push_back(static_cast<double>(n));
    logs.push_back(std::log(worst[static_cast<std::size_t>(n - 1)]));
  }
  LinFit fit = least_squares(ns, logs);
  BunchingReport rep;
  rep.theta_hat = std::exp(fit.slope);
  rep.L_hat = std::exp(fit.intercept);
  rep.n_used = n_max;
  rep.worst_product = *std::max_element(worst.begin(), worst.end());
  rep.pointwise_ok = rep.theta_hat < 1.0 - 0.02;
  return rep;
}

struct HolderEstimate {
  double beta_hat = std::numeric_limits<double>::infinity();
  double const_hat = 0.0;
  bool degenerate = true;  // all differences below the 1e-14 floor
  int n_used = 0;
};

// Least-squares slope of log ||A(x) - A(y)|| against log dist(x, y); pairs
// with vanishing difference are excluded. A constant generator is reported
// with the beta_hat = +infinity marker rather than an error.
inline HolderEstimate estimate_holder(const CocycleGenerator& A,
                                      const std::vector<std::pair<TorusPoint, TorusPoint>>& pairs) {
  std::vector<double> lx, ly;
  for (const auto& [x, y] : pairs) {
    double diff = spectral_norm(A.eval_mat(x) - A.eval_mat(y));
    double dist = torus_dist(x, y);
    if (diff < 1e-14 || dist <= 0.0) continue;
    lx.push_back(std::log(dist));
    ly.push_back(std::log(diff));
  }
  HolderEstimate est;
  est.n_used = static_cast<int>(lx.size());
  if (est.n_used < 2) return est;
  LinFit fit = least_squares(lx, ly);
  est.beta_hat = fit.slope;
  est.const_hat = std::exp(fit.intercept);
  est.degenerate = false;
  return est;
}

}  // namespace cclab
