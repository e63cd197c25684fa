#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace cclab {

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n = 0;
};

inline LinFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  LinFit fit;
  fit.n = static_cast<int>(xs.size());
  if (fit.n < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double n = static_cast<double>(fit.n);
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

// Smallest C with y_i <= C * exp(slope * x_i) over log-log samples.
inline double envelope_constant(const std::vector<double>& log_x,
                                const std::vector<double>& log_y, double slope) {
  double worst = -1e308;
  for (std::size_t i = 0; i < log_x.size(); ++i)
    worst = std::max(worst, log_y[i] - slope * log_x[i]);
  return log_x.empty() ? 0.0 : std::exp(worst);
}

}  // namespace cclab
