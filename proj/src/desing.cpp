#include "dae/desing.hpp"

#include <algorithm>
#include <cmath>

namespace dae::d2 {

namespace {

constexpr double kDipTol = 1e-8;  // |g| threshold for reporting a grazing pass

// Bisection for a sign change of fn(interp(t)) inside one dense-output step.
template <class Fn>
double locate_on_step(const OdeStep<2>& step, double ta, double tb, double va, Fn&& fn) {
  for (int it = 0; it < 100; ++it) {
    const double tm = 0.5 * (ta + tb);
    if (tm == ta || tm == tb) break;
    const double vm = fn(step.interp(tm));
    if ((vm < 0.0) == (va < 0.0)) {
      ta = tm;
      va = vm;
    } else {
      tb = tm;
    }
  }
  return 0.5 * (ta + tb);
}

}  // namespace

double DesingField::divergence(Vec2 p, double alpha) const {
  return fx.gradient(p.x, p.y, alpha)[0] + fy.gradient(p.x, p.y, alpha)[1];
}

DesingField build_desingularized(const System2D& sys) {
  const Expr f1 = sys.f1.partial(0, 0, 0);
  const Expr f2 = sys.f2.partial(0, 0, 0);
  const Expr g = sys.g.partial(0, 0, 0);
  return DesingField{JetExpr(f1), JetExpr(f2 * g), JetExpr(g)};
}

DesingOrbit integrate_desing(const DesingField& field, double alpha, Vec2 p0, double t_end,
                             const BBox& box, const OdeOptions& opt) {
  DesingOrbit out;
  auto rhs = [&](double, const StateN<2>& y) -> StateN<2> {
    return {field.fx.value(y[0], y[1], alpha), field.fy.value(y[0], y[1], alpha)};
  };
  auto g_at = [&](const StateN<2>& y) { return field.g.value(y[0], y[1], alpha); };

  constexpr int kSub = 8;
  auto observer = [&](const OdeStep<2>& step) {
    double ts[kSub + 1], gs[kSub + 1];
    for (int i = 0; i <= kSub; ++i) {
      ts[i] = step.t0 + (step.t1 - step.t0) * (static_cast<double>(i) / kSub);
      gs[i] = g_at(step.interp(ts[i]));
    }
    auto push = [&](double tc, Vec2 p, int direction, bool tangential) {
      if (!out.crossings.empty() &&
          std::abs(out.crossings.back().t - tc) <= 1e-12 * (std::abs(tc) + 1.0))
        return;
      out.crossings.push_back({tc, p, direction, tangential});
    };
    for (int i = 0; i < kSub; ++i) {
      if ((gs[i] < 0.0) != (gs[i + 1] < 0.0)) {
        const double tc = locate_on_step(step, ts[i], ts[i + 1], gs[i], g_at);
        const auto y = step.interp(tc);
        const Vec2 p{y[0], y[1]};
        const auto gr = field.g.gradient(p.x, p.y, alpha);
        const Vec2 F = field.eval(p, alpha);
        const double dgdt = gr[0] * F.x + gr[1] * F.y;
        const double sc = std::max(1.0, std::hypot(gr[0], gr[1]) * norm(F));
        push(tc, p, gs[i] < 0.0 ? +1 : -1, std::abs(dgdt) <= 1e-7 * sc);
      } else if (i > 0 && std::abs(gs[i]) < std::abs(gs[i - 1]) &&
                 std::abs(gs[i]) <= std::abs(gs[i + 1]) &&
                 (gs[i - 1] < 0.0) == (gs[i + 1] < 0.0)) {
        // Grazing candidate: |g| has an interior minimum without a sign
        // change.  Localize the minimum via d(g^2)/dt.
        auto q_at = [&](const StateN<2>& y) {
          const Vec2 p{y[0], y[1]};
          const auto gr = field.g.gradient(p.x, p.y, alpha);
          const Vec2 F = field.eval(p, alpha);
          return field.g.value(p.x, p.y, alpha) * (gr[0] * F.x + gr[1] * F.y);
        };
        const double qa = q_at(step.interp(ts[i - 1]));
        const double qb = q_at(step.interp(ts[i + 1]));
        if ((qa < 0.0) != (qb < 0.0)) {
          const double tc = locate_on_step(step, ts[i - 1], ts[i + 1], qa, q_at);
          const auto y = step.interp(tc);
          if (std::abs(g_at(y)) <= kDipTol) push(tc, {y[0], y[1]}, 0, true);
        }
      }
    }
    const Vec2 p1{step.y1[0], step.y1[1]};
    if (!box.contains(p1)) {
      out.left_box = true;
      return ObserverAction::Stop;
    }
    if (!std::isfinite(p1.x) || !std::isfinite(p1.y)) return ObserverAction::Stop;
    return ObserverAction::Continue;
  };

  out.orbit = integrate_ode<2>(rhs, {p0.x, p0.y}, 0.0, t_end, opt, observer);

  // The stop fires on the first accepted step whose endpoint lies outside the
  // box; truncate that step at the boundary so the recorded orbit ends on it.
  if (out.left_box && !out.orbit.steps.empty()) {
    OdeStep<2>& last = out.orbit.steps.back();
    if (!box.contains({last.y0[0], last.y0[1]}, 1e-12)) {
      out.orbit.steps.pop_back();  // started outside: nothing of the step is usable
    } else if (!box.contains({last.y1[0], last.y1[1]})) {
      double ta = last.t0, tb = last.t1;
      for (int it = 0; it < 100; ++it) {
        const double tm = 0.5 * (ta + tb);
        if (tm == ta || tm == tb) break;
        const auto y = last.interp(tm);
        if (box.contains({y[0], y[1]}))
          ta = tm;
        else
          tb = tm;
      }
      const StateN<2> ye = last.interp(ta);
      last.t1 = ta;
      last.y1 = ye;
      last.f1 = rhs(ta, ye);
      const double dir = t_end >= 0.0 ? 1.0 : -1.0;
      while (!out.crossings.empty() && dir * out.crossings.back().t > dir * ta)
        out.crossings.pop_back();
    }
  }
  return out;
}

std::vector<DaeOrbitPiece> split_to_dae_orbits(const DesingField& field, double alpha,
                                               const DesingOrbit& d) {
  std::vector<DaeOrbitPiece> out;
  const auto& steps = d.orbit.steps;
  if (steps.empty()) return out;
  const double t_begin = steps.front().t0, t_fin = steps.back().t1;
  const double dir = t_fin >= t_begin ? 1.0 : -1.0;

  // Polyline in traversal order; u = dir * t increases along the orbit.
  std::vector<std::pair<double, Vec2>> samples;
  samples.push_back({dir * t_begin, {steps.front().y0[0], steps.front().y0[1]}});
  for (const auto& st : steps) {
    for (int k = 1; k <= 4; ++k) {
      const double t = st.t0 + (st.t1 - st.t0) * (k / 5.0);
      const auto y = st.interp(t);
      samples.push_back({dir * t, {y[0], y[1]}});
    }
    samples.push_back({dir * st.t1, {st.y1[0], st.y1[1]}});
  }

  std::vector<const SigmaCrossing*> cuts;
  for (const auto& c : d.crossings)
    if (c.direction != 0) cuts.push_back(&c);

  std::size_t si = 0;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const double u_hi = k < cuts.size() ? dir * cuts[k]->t : dir * t_fin + 1.0;
    std::vector<Vec2> pts;
    if (k > 0) pts.push_back(cuts[k - 1]->p);
    while (si < samples.size() && samples[si].first < u_hi) {
      pts.push_back(samples[si].second);
      ++si;
    }
    if (k < cuts.size()) pts.push_back(cuts[k]->p);
    if (pts.size() < 2) continue;

    DaeOrbitPiece piece;
    double best = -1.0;
    for (const Vec2& q : pts) {
      const double gv = field.g.value(q.x, q.y, alpha);
      if (std::abs(gv) > best) {
        best = std::abs(gv);
        piece.side = gv >= 0.0 ? +1 : -1;
      }
    }
    const bool keep_order = dir * piece.side > 0.0;
    const bool begin_cut = k > 0, end_cut = k < cuts.size();
    if (keep_order) {
      piece.pts = std::move(pts);
      piece.starts_on_sigma = begin_cut;
      piece.ends_on_sigma = end_cut;
    } else {
      piece.pts.assign(pts.rbegin(), pts.rend());
      piece.starts_on_sigma = end_cut;
      piece.ends_on_sigma = begin_cut;
    }
    out.push_back(std::move(piece));
  }
  return out;
}

LimitCycleResult find_limit_cycle(const DesingField& field, double alpha, Vec2 seed,
                                  const BBox& box, const LimitCycleOptions& opt) {
  LimitCycleResult res;
  const BBox wide{box.x0 - 0.5 * (box.x1 - box.x0), box.y0 - 0.5 * (box.y1 - box.y0),
                  box.x1 + 0.5 * (box.x1 - box.x0), box.y1 + 0.5 * (box.y1 - box.y0)};

  // Forward settling finds attracting cycles; the time-reversed pass finds
  // repelling ones.
  for (const double sgn : {1.0, -1.0}) {
    auto rhs = [&field, alpha, sgn](double, const StateN<2>& y) -> StateN<2> {
      return {sgn * field.fx.value(y[0], y[1], alpha), sgn * field.fy.value(y[0], y[1], alpha)};
    };

    bool escaped = false;
    auto guard = [&](const OdeStep<2>& st) {
      if (!box.contains({st.y1[0], st.y1[1]})) {
        escaped = true;
        return ObserverAction::Stop;
      }
      return ObserverAction::Continue;
    };
    const auto settle = integrate_ode<2>(rhs, {seed.x, seed.y}, 0.0, opt.settle_time, opt.ode, guard);
    if (escaped || settle.steps.empty()) continue;

    const StateN<2> yref = settle.steps.back().y1;
    const Vec2 x_ref{yref[0], yref[1]};
    const StateN<2> fr = rhs(0.0, yref);
    const Vec2 Fr{fr[0], fr[1]};
    const double fnorm = norm(Fr);
    const double scale = std::max(1.0, norm(x_ref));
    if (fnorm <= 1e-8 * scale) continue;  // settled onto an equilibrium
    const Vec2 u = (1.0 / fnorm) * Fr;
    const Vec2 nvec{-u.y, u.x};

    struct Hit {
      bool ok = false;
      Vec2 p{};
      double t = 0.0;
    };
    auto first_return = [&](Vec2 p0) -> Hit {
      Hit hit;
      bool armed = false;
      const double arm_thresh = -1e-6 * scale;
      auto h_of = [&](const StateN<2>& y) {
        return (y[0] - x_ref.x) * u.x + (y[1] - x_ref.y) * u.y;
      };
      double prev_h = h_of({p0.x, p0.y});
      double prev_t = 0.0;
      auto obs = [&](const OdeStep<2>& st) {
        if (!wide.contains({st.y1[0], st.y1[1]})) return ObserverAction::Stop;
        constexpr int kSub = 8;
        for (int i = 1; i <= kSub; ++i) {
          const double t = st.t0 + (st.t1 - st.t0) * (static_cast<double>(i) / kSub);
          const double h = h_of(st.interp(t));
          if (!armed && h < arm_thresh) {
            armed = true;
          } else if (armed && prev_h < 0.0 && h >= 0.0) {
            const double tc = locate_on_step(st, prev_t, t, prev_h, h_of);
            const auto y = st.interp(tc);
            hit.ok = true;
            hit.p = {y[0], y[1]};
            hit.t = tc;
            return ObserverAction::Stop;
          }
          prev_h = h;
          prev_t = t;
        }
        return ObserverAction::Continue;
      };
      integrate_ode<2>(rhs, {p0.x, p0.y}, 0.0, opt.max_return_time, opt.ode, obs);
      return hit;
    };

    auto xi_of = [&](Vec2 p) { return dot(p - x_ref, nvec); };
    const Hit h0 = first_return(x_ref);
    if (!h0.ok) continue;
    const double ftol = opt.fixed_point_tol * scale;
    double xi_star = 0.0, period = h0.t, f0 = xi_of(h0.p);
    if (std::abs(f0) > ftol) {
      double xi0 = 0.0;
      double xi1 = std::clamp(f0, -0.2 * scale, 0.2 * scale);
      bool converged = false;
      for (int it = 0; it < 40; ++it) {
        const Hit h1 = first_return(x_ref + xi1 * nvec);
        if (!h1.ok) break;
        const double f1v = xi_of(h1.p) - xi1;
        period = h1.t;
        if (std::abs(f1v) <= ftol) {
          xi_star = xi1;
          converged = true;
          break;
        }
        const double denom = f1v - f0;
        double dstep = denom != 0.0 ? -f1v * (xi1 - xi0) / denom : -f1v;
        dstep = std::clamp(dstep, -0.1 * scale, 0.1 * scale);
        xi0 = xi1;
        f0 = f1v;
        xi1 += dstep;
      }
      if (!converged) continue;
    }

    // One clean period with the divergence integral carried along; exp of it
    // is the nontrivial multiplier (traversal direction drops out because the
    // same closed curve is covered once either way).
    const Vec2 pstart = x_ref + xi_star * nvec;
    auto rhs3 = [&field, alpha, sgn](double, const StateN<3>& y) -> StateN<3> {
      return {sgn * field.fx.value(y[0], y[1], alpha), sgn * field.fy.value(y[0], y[1], alpha),
              field.divergence({y[0], y[1]}, alpha)};
    };
    const auto cyc = integrate_ode<3>(rhs3, {pstart.x, pstart.y, 0.0}, 0.0, period, opt.ode);
    if (cyc.status != OdeStatus::ReachedEnd || cyc.steps.empty()) continue;

    res.found = true;
    res.section_point = pstart;
    res.period = period;
    res.multiplier = std::exp(cyc.steps.back().y1[2]);
    res.near_unit = res.multiplier >= 0.99 && res.multiplier <= 1.01;
    res.pts.clear();
    res.pts.push_back({cyc.steps.front().y0[0], cyc.steps.front().y0[1]});
    for (const auto& st : cyc.steps) {
      for (int k = 1; k <= 4; ++k) {
        const auto y = st.interp(st.t0 + (st.t1 - st.t0) * (k / 5.0));
        res.pts.push_back({y[0], y[1]});
      }
      res.pts.push_back({st.y1[0], st.y1[1]});
    }
    int ncross = 0;
    for (std::size_t i = 0; i < res.pts.size(); ++i) {
      const Vec2 a = res.pts[i];
      const Vec2 b = res.pts[(i + 1) % res.pts.size()];
      const double ga = field.g.value(a.x, a.y, alpha);
      const double gb = field.g.value(b.x, b.y, alpha);
      if ((ga < 0.0) != (gb < 0.0)) ++ncross;
    }
    res.sigma_crossings = ncross;
    res.folded = ncross > 0;
    return res;
  }
  return res;
}

}  // namespace dae::d2
