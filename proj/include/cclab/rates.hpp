#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cclab/errors.hpp"
#include "cclab/torus.hpp"

namespace cclab {

using RateFn = std::function<double(const TorusPoint&)>;

// Contraction/expansion rate functions of the base system, all valued in
// (0,1). For a toral automorphism the natural choice is
// nu = nu_hat = mu = mu_hat = 1/lambda with gamma = gamma_hat a convention
// in (1/lambda, 1); the center bundle is trivial so any such gamma works.
struct RateData {
  RateFn nu, nu_hat, gamma, gamma_hat, mu, mu_hat;

  static RateData constants(double nu, double nu_hat, double gamma, double gamma_hat, double mu,
                            double mu_hat) {
    auto c = [](double v) { return RateFn([v](const TorusPoint&) { return v; }); };
    return RateData{c(nu), c(nu_hat), c(gamma), c(gamma_hat), c(mu), c(mu_hat)};
  }

  static RateData for_map(const HyperbolicToralMap& f, double gamma_exponent = 0.4) {
    double inv_lambda = 1.0 / f.lambda;
    double g = std::pow(f.lambda, -gamma_exponent);
    return constants(inv_lambda, inv_lambda, g, g, inv_lambda, inv_lambda);
  }
};

inline std::vector<TorusPoint> uniform_grid(int n) {
  std::vector<TorusPoint> pts;
  pts.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  return pts;
}

struct RateCheckReport {
  bool holds = false;
  double worst_margin = 0.0;
};

// nu < gamma gamma_hat and nu_hat < gamma gamma_hat at every grid point;
// margin is min of gamma gamma_hat - max(nu, nu_hat).
inline RateCheckReport check_center_bunching(const RateData& r,
                                             const std::vector<TorusPoint>& grid) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& x : grid) {
    double gg = r.gamma(x) * r.gamma_hat(x);
    worst = std::min(worst, gg - std::max(r.nu(x), r.nu_hat(x)));
  }
  return {worst > 0.0, worst};
}

// nu^theta < gamma gamma_hat, nu_hat^theta < gamma gamma_hat, and the side
// conditions nu/gamma < mu^theta, nu_hat/gamma_hat < mu_hat^theta.
inline RateCheckReport check_strong_center_bunching(const RateData& r, double theta, double eps,
                                                    const std::vector<TorusPoint>& grid) {
  if (!(theta > 0.0 && theta < eps && eps < 1.0))
    throw InvalidTheta("theta must lie in (0, eps) with eps in (0,1)");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& x : grid) {
    double gg = r.gamma(x) * r.gamma_hat(x);
    double m1 = gg - std::pow(r.nu(x), theta);
    double m2 = gg - std::pow(r.nu_hat(x), theta);
    double m3 = std::pow(r.mu(x), theta) - r.nu(x) / r.gamma(x);
    double m4 = std::pow(r.mu_hat(x), theta) - r.nu_hat(x) / r.gamma_hat(x);
    worst = std::min({worst, m1, m2, m3, m4});
  }
  return {worst > 0.0, worst};
}

// Pointwise chain mu <= nu < gamma < gamma_hat^{-1} < nu_hat^{-1} <= mu_hat^{-1}.
// Margin is the smallest slack; the <= links may be tight.
inline RateCheckReport validate_rate_chain(const RateData& r,
                                           const std::vector<TorusPoint>& grid) {
  bool holds = true;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& x : grid) {
    double nu = r.nu(x), nu_hat = r.nu_hat(x), gamma = r.gamma(x), gamma_hat = r.gamma_hat(x),
           mu = r.mu(x), mu_hat = r.mu_hat(x);
    double weak1 = nu - mu;
    double weak2 = 1.0 / mu_hat - 1.0 / nu_hat;
    double strict1 = gamma - nu;
    double strict2 = 1.0 / gamma_hat - gamma;
    double strict3 = 1.0 / nu_hat - 1.0 / gamma_hat;
    if (weak1 < 0.0 || weak2 < 0.0 || strict1 <= 0.0 || strict2 <= 0.0 || strict3 <= 0.0)
      holds = false;
    worst = std::min({worst, weak1, weak2, strict1, strict2, strict3});
  }
  return {holds, worst};
}

}  // namespace cclab
