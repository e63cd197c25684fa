#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cclab/errors.hpp"
#include "cclab/torus.hpp"

namespace cclab {

// One segment along a stable or unstable leaf: end = reduce(start + t * v).
// Endpoints of constructed paths are snapped so that consecutive legs chain
// bitwise; the derived relation for end holds to ~1e-15.
struct SuLeg {
  TorusPoint start;
  LegType type = LegType::stable;
  double t = 0.0;
  TorusPoint end;
};

inline SuLeg make_leg(const HyperbolicToralMap& f, const TorusPoint& start, LegType type,
                      double t) {
  return SuLeg{start, type, t, leaf_point(f, start, type, t)};
}

inline SuLeg reversed(const SuLeg& leg) { return SuLeg{leg.end, leg.type, -leg.t, leg.start}; }

// Concatenation of su-legs; the empty path is the trivial path at a point.
struct SuPath {
  TorusPoint base;  // start point; meaningful even with no legs
  std::vector<SuLeg> legs;

  const TorusPoint& start() const { return base; }
  const TorusPoint& end() const { return legs.empty() ? base : legs.back().end; }
  bool trivial() const { return legs.empty(); }

  bool chains_exactly() const {
    if (legs.empty()) return true;
    if (!(legs.front().start == base)) return false;
    for (std::size_t i = 0; i + 1 < legs.size(); ++i)
      if (!(legs[i].end == legs[i + 1].start)) return false;
    return true;
  }
};

inline SuPath trivial_path(const TorusPoint& x) { return SuPath{x, {}}; }

inline SuPath reversed(const SuPath& p) {
  SuPath r = trivial_path(p.end());
  r.legs.reserve(p.legs.size());
  for (auto it = p.legs.rbegin(); it != p.legs.rend(); ++it) r.legs.push_back(reversed(*it));
  return r;
}

inline SuPath concat(const SuPath& p, const SuPath& q) {
  if (!(q.start() == p.end()))
    throw NotACycle("concat: second path does not start at the end of the first");
  SuPath r = p;
  r.legs.insert(r.legs.end(), q.legs.begin(), q.legs.end());
  return r;
}

namespace detail {

struct RouteCandidate {
  double s = 0.0;  // unstable leg parameter
  double u = 0.0;  // stable leg parameter
  int kx = 0, ky = 0;
  double score() const { return std::max(std::abs(s), std::abs(u)); }
};

// Solve x + s v_u + u v_s = y + k over lifts k with ||k||_inf <= radius,
// ordered by max(|s|,|u|) with lexicographic (kx, ky) tie-breaking.
inline std::vector<RouteCandidate> route_candidates(const HyperbolicToralMap& f,
                                                    const TorusPoint& x, const TorusPoint& y,
                                                    int radius) {
  std::vector<RouteCandidate> out;
  out.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  double det = f.v_u.a * f.v_s.b - f.v_s.a * f.v_u.b;
  for (int kx = -radius; kx <= radius; ++kx)
    for (int ky = -radius; ky <= radius; ++ky) {
      double da = y.x1 + kx - x.x1;
      double db = y.x2 + ky - x.x2;
      double s = (da * f.v_s.b - f.v_s.a * db) / det;
      double u = (f.v_u.a * db - da * f.v_u.b) / det;
      out.push_back({s, u, kx, ky});
    }
  std::stable_sort(out.begin(), out.end(), [](const RouteCandidate& a, const RouteCandidate& b) {
    if (a.score() != b.score()) return a.score() < b.score();
    if (a.kx != b.kx) return a.kx < b.kx;
    return a.ky < b.ky;
  });
  return out;
}

inline SuPath route_from_candidate(const HyperbolicToralMap& f, const TorusPoint& x,
                                   const TorusPoint& y, const RouteCandidate& c) {
  SuPath p = trivial_path(x);
  SuLeg leg1 = make_leg(f, x, LegType::unstable, c.s);
  SuLeg leg2{leg1.end, LegType::stable, c.u, y};  // end snapped to the target
  p.legs.push_back(leg1);
  p.legs.push_back(leg2);
  return p;
}

}  // namespace detail

// Canonical two-leg su-path from x to y: unstable leg to the lift
// intersection z, then stable leg to y. The lift search minimizes
// max(|s|,|t|) over ||k||_inf <= 3, expanding once on failure.
inline SuPath connect_su(const HyperbolicToralMap& f, const TorusPoint& x, const TorusPoint& y,
                         double max_leg) {
  if (max_leg <= 0.0) throw NoPathWithinBound("max_leg must be positive");
  if (x == y) return trivial_path(x);
  for (int radius : {3, 6}) {
    auto cands = detail::route_candidates(f, x, y, radius);
    if (!cands.empty() && cands.front().score() <= max_leg)
      return detail::route_from_candidate(f, x, y, cands.front());
  }
  throw NoPathWithinBound("no su-route with leg parameters within " + std::to_string(max_leg));
}

// Two distinct su-routes from x to y (different lift choices); used for
// path-independence tests and seeded cycle construction.
inline std::pair<SuPath, SuPath> two_routes(const HyperbolicToralMap& f, const TorusPoint& x,
                                            const TorusPoint& y, double max_leg) {
  if (max_leg <= 0.0) throw NoPathWithinBound("max_leg must be positive");
  for (int radius : {3, 6}) {
    auto cands = detail::route_candidates(f, x, y, radius);
    if (cands.size() >= 2 && cands[1].score() <= max_leg)
      return {detail::route_from_candidate(f, x, y, cands[0]),
              detail::route_from_candidate(f, x, y, cands[1])};
  }
  throw NoPathWithinBound("no two su-routes with leg parameters within " +
                          std::to_string(max_leg));
}

// Forward/backward orbit of a leg endpoint pair. The companion point is kept
// as an analytic offset along the leaf direction: f^k(x + t v) equals
// f^k(x) + t e^k v exactly for the linear map, so the pair never decorrelates
// the way two independently rounded orbits do.
struct LeafOrbit {
  const HyperbolicToralMap* f;
  LegType type;
  TorusPoint base;
  double offset;

  LeafOrbit(const HyperbolicToralMap& map, const TorusPoint& x, LegType type, double t)
      : f(&map), type(type), base(x), offset(t) {}

  TorusPoint companion() const { return translate(base, f->direction(type), offset); }

  void step_forward() {
    base = apply_step(*f, base);
    offset *= f->signed_eigenvalue(type);
  }
  void step_backward() {
    base = apply_step_inv(*f, base);
    offset /= f->signed_eigenvalue(type);
  }
};

// Leg transported by f^n: start moves along the orbit and the leaf parameter
// is scaled by the signed eigenvalue, exactly for the linear base.
inline SuLeg iterate_leg(const HyperbolicToralMap& f, const SuLeg& leg, std::int64_t n) {
  double e = f.signed_eigenvalue(leg.type);
  double t = leg.t;
  if (n >= 0)
    for (std::int64_t k = 0; k < n; ++k) t *= e;
  else
    for (std::int64_t k = 0; k < -n; ++k) t /= e;
  return make_leg(f, apply(f, leg.start, n), leg.type, t);
}

}  // namespace cclab
