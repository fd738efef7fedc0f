// Desingularized companion flow for the 2D quasilinear system
//
//   g(x,y,a) * x' = f1(x,y,a),   y' = f2(x,y,a).
//
// The companion field (f1, f2*g) is smooth across the singular set {g = 0}
// and traces the same curves as the original system; on {g < 0} it runs in
// the opposite time direction.  All 2D orbit computation happens in the
// companion flow, and orbits are reinterpreted afterwards: each piece
// between singular-set crossings is a genuine orbit of the original system
// once its orientation is fixed by the sign of g.
#pragma once

#include <vector>

#include "dae/linalg.hpp"
#include "dae/ode.hpp"
#include "dae/system.hpp"

namespace dae::d2 {

// Companion field components as differentiable expressions.  The second
// component of a system built by `build_desingularized` is the exact
// symbolic product f2 * g, so its derivatives carry no rounding beyond
// evaluation itself.
struct DesingField {
  JetExpr fx;  // dx/dt
  JetExpr fy;  // dy/dt
  JetExpr g;   // singular-set function, kept for side bookkeeping

  Vec2 eval(Vec2 p, double alpha) const {
    return {fx.value(p.x, p.y, alpha), fy.value(p.x, p.y, alpha)};
  }
  // Divergence of the field; the nontrivial Floquet multiplier of a planar
  // periodic orbit is exp of its integral over one period.
  double divergence(Vec2 p, double alpha) const;
};

DesingField build_desingularized(const System2D& sys);

// A localized singular-set crossing (or near-tangency) of a companion orbit.
struct SigmaCrossing {
  double t = 0.0;          // companion time
  Vec2 p{};                // point on (or nearest to) the singular set
  int direction = 0;       // +1: g increasing through 0, -1: decreasing, 0: tangency
  bool tangential = false; // d(g)/dt vanished at the event, or g dipped to ~0 without a sign change
};

struct DesingOrbit {
  DenseOrbit<2> orbit;
  std::vector<SigmaCrossing> crossings;
  bool left_box = false;
};

// Integrates the companion field from p0 over [0, t_end] (t_end may be
// negative), stopping at the box boundary.  Crossings of {g = 0} are
// localized on the dense output to the interpolant's accuracy.
DesingOrbit integrate_desing(const DesingField& field, double alpha, Vec2 p0, double t_end,
                             const BBox& box, const OdeOptions& opt = {});

// One maximal piece of a companion orbit on a single side of the singular
// set, reinterpreted as an orbit of the original system: `pts` are ordered
// by original time, which reverses the companion order on {g < 0}.
struct DaeOrbitPiece {
  std::vector<Vec2> pts;
  int side = 0;                 // +1 on {g > 0}, -1 on {g < 0}
  bool starts_on_sigma = false; // original-time start lies on the singular set
  bool ends_on_sigma = false;   // original-time end does (finite-time arrival)
};

std::vector<DaeOrbitPiece> split_to_dae_orbits(const DesingField& field, double alpha,
                                               const DesingOrbit& orbit);

struct LimitCycleResult {
  bool found = false;
  Vec2 section_point{};     // fixed point of the first-return map
  double period = 0.0;      // companion-time period
  double multiplier = 0.0;  // nontrivial Floquet multiplier of the companion cycle
  bool folded = false;      // cycle crosses the singular set
  int sigma_crossings = 0;
  bool near_unit = false;   // multiplier within 1% of 1: classification unreliable
  std::vector<Vec2> pts;    // one period of the cycle, companion orientation
};

struct LimitCycleOptions {
  double settle_time = 40.0;   // transient integration before building the section
  double max_return_time = 100.0;
  double fixed_point_tol = 1e-10;
  OdeOptions ode{};            // per-return integration control
};

// Locates an attracting (or, by time reversal, repelling) periodic orbit of
// the companion flow near the forward orbit of `seed`: settles the
// transient, then solves the first-return map on a transversal section by
// damped secant iteration.
LimitCycleResult find_limit_cycle(const DesingField& field, double alpha, Vec2 seed,
                                  const BBox& box, const LimitCycleOptions& opt = {});

}  // namespace dae::d2
