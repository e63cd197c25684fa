#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cclab/errors.hpp"
#include "cclab/generator.hpp"
#include "cclab/holonomy.hpp"
#include "cclab/operator.hpp"
#include "cclab/sampling.hpp"
#include "cclab/su_path.hpp"
#include "cclab/su_weights.hpp"

namespace cclab {

// Conjugacy candidate C : T^2 -> GL(d, R), either closed form or extended
// from a base value by su-path-weight propagation. Extended fields memoize
// evaluations behind a mutex: reads may be concurrent, writes serialize.
class ConjugacyField {
public:
  enum class Provenance { closed_form, extended_from_base, grid };

  static ConjugacyField closed_form(const TorusPoint& base_point,
                                    std::function<Operator(TorusPoint)> fn) {
    Operator base_value = fn(base_point);
    return ConjugacyField(base_point, base_value, std::move(fn), Provenance::closed_form,
                          false);
  }

  const TorusPoint& base_point() const { return impl_->base_point; }
  const Operator& base_value() const { return impl_->base_value; }
  Provenance provenance() const { return impl_->provenance; }

  Operator eval(const TorusPoint& p) const {
    TorusPoint x = reduce(p);
    if (!impl_->memoize) return impl_->fn(x);
    Key key{x.x1, x.x2};
    {
      std::lock_guard<std::mutex> lock(impl_->mutex);
      auto it = impl_->cache.find(key);
      if (it != impl_->cache.end()) return it->second;
    }
    Operator v = impl_->fn(x);
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->cache.try_emplace(key, v).first->second;
  }

  // Gauge change C(x) -> C(x) G by a constant operator.
  ConjugacyField right_multiplied(const Operator& g) const {
    auto base = impl_;
    auto fn = [base, g](const TorusPoint& x) { return base->fn(x) * g; };
    return ConjugacyField(impl_->base_point, impl_->base_value * g, std::move(fn),
                          impl_->provenance, impl_->memoize);
  }

  static ConjugacyField extended(const TorusPoint& base_point, const Operator& base_value,
                                 std::function<Operator(TorusPoint)> fn) {
    return ConjugacyField(base_point, base_value, std::move(fn),
                          Provenance::extended_from_base, true);
  }

private:
  struct Key {
    double a, b;
    bool operator==(const Key& o) const { return a == o.a && b == o.b; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t ha = 0, hb = 0;
      static_assert(sizeof(double) == sizeof(std::uint64_t));
      std::memcpy(&ha, &k.a, sizeof(ha));
      std::memcpy(&hb, &k.b, sizeof(hb));
      std::uint64_t h = ha * 0x9e3779b97f4a7c15ull ^ (hb + 0x7f4a7c15ull + (ha << 6));
      return static_cast<std::size_t>(h);
    }
  };
  struct Impl {
    Impl(const TorusPoint& bp, Operator bv, std::function<Operator(TorusPoint)> f,
         Provenance prov, bool memo)
        : base_point(bp), base_value(std::move(bv)), fn(std::move(f)), provenance(prov),
          memoize(memo) {}
    TorusPoint base_point;
    Operator base_value;
    std::function<Operator(TorusPoint)> fn;
    Provenance provenance;
    bool memoize;
    mutable std::mutex mutex;
    mutable std::unordered_map<Key, Operator, KeyHash> cache;
  };

  ConjugacyField(const TorusPoint& bp, const Operator& bv,
                 std::function<Operator(TorusPoint)> fn, Provenance prov, bool memoize)
      : impl_(std::make_shared<Impl>(bp, bv, std::move(fn), prov, memoize)) {}

  std::shared_ptr<Impl> impl_;
};

// Sup over a grid of ||A(x) - C(fx) B(x) C(x)^{-1}||, the defect of the
// cohomological equation.
inline double cohomology_residual(const CocycleGenerator& A, const CocycleGenerator& B,
                                  const ConjugacyField& C, const HyperbolicToralMap& f,
                                  const std::vector<TorusPoint>& grid, int threads = 1) {
  std::vector<double> res(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const TorusPoint& x = grid[i];
    Operator cf = C.eval(apply_step(f, x));
    Operator cx = C.eval(x);
    Eigen::MatrixXd rhs = cf.mat() * B.eval_mat(x) * cx.inv();
    res[i] = spectral_norm(A.eval_mat(x) - rhs);
  });
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  return worst;
}

struct IntertwiningReport {
  double stable = 0.0;
  double unstable = 0.0;
  int n_stable = 0;
  int n_unstable = 0;
};

// Sup defect of H^{A}_{x,y} = C(y) H^{B}_{x,y} C(x)^{-1} over the sampled
// legs, reported separately for stable and unstable legs.
inline IntertwiningReport intertwining_residual(const CocycleGenerator& A,
                                                const CocycleGenerator& B,
                                                const ConjugacyField& C,
                                                const HyperbolicToralMap& f,
                                                const std::vector<SuLeg>& legs,
                                                double tol = 1e-11, int n_max = 200) {
  IntertwiningReport rep;
  for (const auto& leg : legs) {
    HolonomyResult ha = leg_holonomy(A, f, leg, tol, n_max);
    HolonomyResult hb = leg_holonomy(B, f, leg, tol, n_max);
    Operator cy = C.eval(leg.end);
    Operator cx = C.eval(leg.start);
    double defect = spectral_norm(ha.H.mat() - cy.mat() * hb.H.mat() * cx.inv());
    if (leg.type == LegType::stable) {
      rep.stable = std::max(rep.stable, defect);
      ++rep.n_stable;
    } else {
      rep.unstable = std::max(rep.unstable, defect);
      ++rep.n_unstable;
    }
  }
  return rep;
}

// Residual of Prop. intertwined-conjugacy (ii) along one su-path:
// || H^{A,P}_{x,y} - C(y) H^{B,P}_{x,y} C(x)^{-1} ||.
inline double conjugated_weight_residual(const CocycleGenerator& A, const CocycleGenerator& B,
                                         const ConjugacyField& C, const HyperbolicToralMap& f,
                                         const SuPath& path, double tol = 1e-11,
                                         int n_max = 200) {
  Operator wa = path_weight(A, f, path, tol, n_max).W;
  Operator wb = path_weight(B, f, path, tol, n_max).W;
  Operator cy = C.eval(path.end());
  Operator cx = C.eval(path.start());
  return spectral_norm(wa.mat() - cy.mat() * wb.mat() * cx.inv());
}

// Conjugacy value transported along a path: W_A C0 W_B^{-1}.
inline Operator propagate_along(const CocycleGenerator& A, const CocycleGenerator& B,
                                const HyperbolicToralMap& f, const SuPath& path,
                                const Operator& c0, double tol = 1e-11, int n_max = 200) {
  Operator wa = path_weight(A, f, path, tol, n_max).W;
  Operator wb = path_weight(B, f, path, tol, n_max).W;
  return wa * c0 * wb.inverse();
}

// Constructive form of the sufficient-condition theorem: verify the
// cohomological equation at x0 with C(fx0) propagated along an su-path, then
// extend C(y) by path-weight propagation along the canonical connect_su
// route. Path independence is a measured property, never assumed.
inline ConjugacyField extend_from_base(const CocycleGenerator& A, const CocycleGenerator& B,
                                       const HyperbolicToralMap& f, const TorusPoint& x0,
                                       const Operator& c0, double tol_premise = 1e-8,
                                       double max_leg = 3.0, double tol = 1e-11,
                                       int n_max = 200) {
  TorusPoint fx0 = apply_step(f, x0);
  SuPath p0 = connect_su(f, x0, fx0, max_leg);
  Operator c_fx0 = propagate_along(A, B, f, p0, c0, tol, n_max);
  double premise =
      spectral_norm(A.eval_mat(x0) - c_fx0.mat() * B.eval_mat(x0) * c0.inv());
  if (!(premise < tol_premise))
    throw PremiseViolated("cohomological equation fails at the base point (residual " +
                              std::to_string(premise) + ")",
                          premise);
  TorusPoint base = reduce(x0);
  auto fn = [A, B, f, base, c0, max_leg, tol, n_max](const TorusPoint& y) {
    if (y == base) return c0;
    SuPath p = connect_su(f, base, y, max_leg);
    return propagate_along(A, B, f, p, c0, tol, n_max);
  };
  return ConjugacyField::extended(base, c0, std::move(fn));
}

// Assumption (i) surrogate: max over random targets y of the disagreement
// between propagation along two distinct su-routes x0 -> y. Draw order per
// target: intermediate point (two uniforms).
inline double path_independence_residual(const CocycleGenerator& A, const CocycleGenerator& B,
                                         const HyperbolicToralMap& f, const TorusPoint& x0,
                                         const Operator& c0, int n_targets,
                                         double max_leg = 3.0, double tol = 1e-11,
                                         int n_max = 200, std::uint64_t seed = 0x5eedu) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < n_targets; ++i) {
    TorusPoint y = rng.point();
    auto [p1, p2] = two_routes(f, x0, y, max_leg);
    Operator c1 = propagate_along(A, B, f, p1, c0, tol, n_max);
    Operator c2 = propagate_along(A, B, f, p2, c0, tol, n_max);
    worst = std::max(worst, spectral_norm(c1.mat() - c2.mat()));
  }
  return worst;
}

struct ConstantTargetResult {
  Operator B0 = Operator::identity(1);
  CocycleGenerator B;
  ConjugacyField C;
  double cycle_defect = 0.0;
  double cohomology_residual = 0.0;
};

// When all cycle weights at x0 are trivial, the constant cocycle
// B0 = C0^{-1} (H^{A,P}_{x0,fx0})^{-1} A(x0) C0 is the canonical constant
// target; the extension of C0 then conjugates A to B0.
inline ConstantTargetResult constant_target_from_holonomy(
    const CocycleGenerator& A, const HyperbolicToralMap& f, const TorusPoint& x0,
    const Operator& c0, double tol_cycles = 1e-6, int n_cycles = 50, double max_leg = 3.0,
    double tol = 1e-11, int n_max = 200, std::uint64_t seed = 0x5eedu, int grid_n = 16) {
  CycleTrivialityReport cyc =
      cycle_triviality_test(A, f, x0, n_cycles, max_leg, tol, n_max, seed);
  if (!(cyc.max_defect < tol_cycles))
    throw CycleObstruction("su-cycle weights at x0 are non-trivial (defect " +
                               std::to_string(cyc.max_defect) + ")",
                           cyc.max_defect);
  TorusPoint fx0 = apply_step(f, x0);
  SuPath p0 = connect_su(f, x0, fx0, max_leg);
  Operator wa = path_weight(A, f, p0, tol, n_max).W;
  Operator b0 = c0.inverse() * wa.inverse() * Operator::from_matrix(A.eval_mat(x0)) * c0;
  CocycleGenerator B = CocycleGenerator::constant(b0.mat());
  ConjugacyField C = extend_from_base(A, B, f, x0, c0, 1e-6, max_leg, tol, n_max);
  double res = cohomology_residual(A, B, C, f, uniform_grid(grid_n));
  return ConstantTargetResult{b0, B, C, cyc.max_defect, res};
}

}  // namespace cclab
