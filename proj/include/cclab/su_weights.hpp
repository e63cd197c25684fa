#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cclab/errors.hpp"
#include "cclab/generator.hpp"
#include "cclab/holonomy.hpp"
#include "cclab/operator.hpp"
#include "cclab/sampling.hpp"
#include "cclab/su_path.hpp"

namespace cclab {

// Weight of an su-path: the ordered composition of per-leg holonomies, the
// last leg applied last (left-most matrix factor).
struct PathWeight {
  SuPath path;
  Operator W = Operator::identity(1);
  std::vector<HolonomyResult> per_leg;
};

inline PathWeight path_weight(const CocycleGenerator& A, const HyperbolicToralMap& f,
                              const SuPath& path, double tol = 1e-11, int n_max = 200) {
  if (!path.chains_exactly()) throw NotACycle("path legs do not chain");
  PathWeight pw{path, Operator::identity(A.dim()), {}};
  pw.per_leg.reserve(path.legs.size());
  for (std::size_t i = 0; i < path.legs.size(); ++i) {
    HolonomyResult r;
    try {
      r = leg_holonomy(A, f, path.legs[i], tol, n_max);
    } catch (const Diverged& d) {
      throw Diverged(std::string(d.what()) + " (leg " + std::to_string(i) + ")", d.n_at,
                     static_cast<int>(i));
    }
    if (!r.converged)
      throw Diverged("leg holonomy did not converge within n_max", r.n_used,
                     static_cast<int>(i));
    pw.W = r.H * pw.W;
    pw.per_leg.push_back(std::move(r));
  }
  return pw;
}

inline Operator cycle_weight(const CocycleGenerator& A, const HyperbolicToralMap& f,
                             const SuPath& cycle, double tol = 1e-11, int n_max = 200) {
  if (!(cycle.start() == cycle.end()))
    throw NotACycle("cycle endpoints differ");
  return path_weight(A, f, cycle, tol, n_max).W;
}

// Seeded 4-leg cycle at x0: two distinct 2-leg su-routes to a random
// intermediate point, the second traversed in reverse. Draw order per cycle:
// intermediate point (two uniforms).
inline SuPath seeded_cycle(const HyperbolicToralMap& f, const TorusPoint& x0, Rng& rng,
                           double max_leg) {
  TorusPoint y = rng.point();
  auto [r1, r2] = two_routes(f, x0, y, max_leg);
  return concat(r1, reversed(r2));
}

struct CycleTrivialityReport {
  double max_defect = 0.0;  // max ||W - Id|| over the seeded cycles
  int n_cycles = 0;
  int worst_index = -1;
};

// Defect of Eq. trivial-holonomy over a seeded family of su-cycles at x0.
inline CycleTrivialityReport cycle_triviality_test(const CocycleGenerator& A,
                                                   const HyperbolicToralMap& f,
                                                   const TorusPoint& x0, int n_cycles,
                                                   double max_leg, double tol = 1e-11,
                                                   int n_max = 200,
                                                   std::uint64_t seed = 0x5eedu) {
  if (n_cycles < 1) throw std::invalid_argument("n_cycles must be at least 1");
  Rng rng(seed);
  CycleTrivialityReport rep;
  rep.n_cycles = n_cycles;
  for (int i = 0; i < n_cycles; ++i) {
    SuPath cycle = seeded_cycle(f, x0, rng, max_leg);
    double defect = distance_to_identity(cycle_weight(A, f, cycle, tol, n_max));
    if (defect > rep.max_defect) {
      rep.max_defect = defect;
      rep.worst_index = i;
    }
  }
  return rep;
}

}  // namespace cclab
