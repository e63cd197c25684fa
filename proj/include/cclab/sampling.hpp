#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "cclab/torus.hpp"

namespace cclab {

// Single pseudo-random stream per run. Uniforms are derived from raw
// mt19937_64 output ((w >> 11) * 2^-53) so draws do not depend on the
// standard library's distribution implementations. Draw orders:
//   point():            x1 then x2
//   log_uniform(lo,hi): one draw
//   signed_log_uniform: magnitude draw then sign draw
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t raw() { return eng_(); }

  TorusPoint point() {
    double a = uniform01();
    double b = uniform01();
    return {a, b};
  }

  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  double sign() { return (eng_() & 1u) ? 1.0 : -1.0; }

  double signed_log_uniform(double lo, double hi) {
    double m = log_uniform(lo, hi);
    return m * sign();
  }

private:
  std::mt19937_64 eng_;
};

// Deterministic parallel map: f(i) writes only state addressed by i, the
// caller reduces serially afterwards.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cclab
