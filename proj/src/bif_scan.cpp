#include "dae/bif_scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "dae/desing.hpp"

namespace dae::scan {

namespace {

using d2::BifCode;
using d2::DesingField;
using d2::DesingOrbit;
using d2::LimitCycleResult;
using d2::build_desingularized;
using d2::find_limit_cycle;
using d2::integrate_desing;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_pt(Vec2 p) { return "(" + fmt(p.x) + ", " + fmt(p.y) + ")"; }

// Symbolic defining functions shared by the extended systems.
struct Symbols {
  Expr f1, f2, g, gx, gy, gxx;
  Expr det_f1f2, det_f1g, det_eq, tr_eq, det_seq, tr_seq, disc_seq;

  explicit Symbols(const System2D& s)
      : f1(s.f1.partial(0, 0, 0)),
        f2(s.f2.partial(0, 0, 0)),
        g(s.g.partial(0, 0, 0)),
        gx(s.g.partial(1, 0, 0)),
        gy(s.g.partial(0, 1, 0)),
        gxx(s.g.partial(2, 0, 0)),
        det_f1f2(Expr::constant(0.0)),
        det_f1g(Expr::constant(0.0)),
        det_eq(Expr::constant(0.0)),
        tr_eq(Expr::constant(0.0)),
        det_seq(Expr::constant(0.0)),
        tr_seq(Expr::constant(0.0)),
        disc_seq(Expr::constant(0.0)) {
    const Expr f1x = s.f1.partial(1, 0, 0), f1y = s.f1.partial(0, 1, 0);
    const Expr f2x = s.f2.partial(1, 0, 0), f2y = s.f2.partial(0, 1, 0);
    det_f1f2 = f1x * f2y - f1y * f2x;
    det_f1g = f1x * gy - f1y * gx;
    det_eq = g * det_f1f2;
    tr_eq = f1x + g * f2y;
    det_seq = f2 * det_f1g;
    tr_seq = f1x + gy * f2;
    const Expr d = f1x - gy * f2;
    disc_seq = d * d + Expr::constant(4.0) * f1y * gx * f2;
  }
};

struct Root3 {
  Vec2 p;
  double alpha = 0.0;
  double det_jext = 0.0;
};

// Multistart Newton on three expressions in (x, y, alpha).
std::vector<Root3> solve_extended(const std::array<Expr, 3>& H, const BBox& box, Interval ar,
                                  int grid_n, const Tol& tol, Exec exec) {
  const std::array<JetExpr, 3> HJ{JetExpr(H[0]), JetExpr(H[1]), JetExpr(H[2])};
  const int na = std::max(4, grid_n / 2);
  std::vector<std::array<double, 3>> seeds;
  seeds.reserve(static_cast<std::size_t>(grid_n) * grid_n * na);
  const double dx = (box.x1 - box.x0) / grid_n, dy = (box.y1 - box.y0) / grid_n;
  const double da = ar.length() / na;
  for (int k = 0; k < na; ++k)
    for (int j = 0; j < grid_n; ++j)
      for (int i = 0; i < grid_n; ++i)
        seeds.push_back({box.x0 + (i + 0.5) * dx, box.y0 + (j + 0.5) * dy, ar.lo + (k + 0.5) * da});

  auto F = [&](const std::array<double, 3>& q) -> std::array<double, 3> {
    return {HJ[0].value(q[0], q[1], q[2]), HJ[1].value(q[0], q[1], q[2]),
            HJ[2].value(q[0], q[1], q[2])};
  };
  auto J = [&](const std::array<double, 3>& q) -> std::array<double, 9> {
    const auto g0 = HJ[0].gradient(q[0], q[1], q[2]);
    const auto g1 = HJ[1].gradient(q[0], q[1], q[2]);
    const auto g2 = HJ[2].gradient(q[0], q[1], q[2]);
    return {g0[0], g0[1], g0[2], g1[0], g1[1], g1[2], g2[0], g2[1], g2[2]};
  };

  NewtonOptions nopt;
  nopt.f_tol = tol.newton;
  const auto results = multistart_newton<3>(F, J, seeds, nopt, exec);

  std::vector<Root3> roots;
  const double bslack = 1e-9 * std::max(1.0, box.diag());
  const double aslack = 1e-9 * std::max(1.0, ar.length());
  for (const auto& r : results) {
    if (!r.converged) continue;
    const Vec2 p{r.x[0], r.x[1]};
    const double a = r.x[2];
    if (!box.contains(p, bslack) || !ar.contains(a, aslack)) continue;
    const double sc = std::max({1.0, std::abs(p.x), std::abs(p.y), std::abs(a)});
    bool dup = false;
    for (const Root3& q : roots)
      if (std::max({std::abs(q.p.x - p.x), std::abs(q.p.y - p.y), std::abs(q.alpha - a)}) <=
          1e-8 * sc) {
        dup = true;
        break;
      }
    if (dup) continue;
    const auto jm = J(r.x);
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.m[i] = jm[i];
    roots.push_back({p, a, m.det()});
  }
  std::sort(roots.begin(), roots.end(), [](const Root3& a, const Root3& b) {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
  });
  return roots;
}

// F/J factories for the three 2D defining systems at fixed alpha.
// which: 0 = (f1, f2) equilibria, 1 = (f1, g) singular equilibria,
// 2 = (g, g_x) folds.
std::function<std::array<double, 2>(const std::array<double, 2>&)> make_F2(const System2D& sys,
                                                                           int which, double a) {
  return [&sys, which, a](const std::array<double, 2>& q) -> std::array<double, 2> {
    switch (which) {
      case 0:
        return {sys.f1.value(q[0], q[1], a), sys.f2.value(q[0], q[1], a)};
      case 1:
        return {sys.f1.value(q[0], q[1], a), sys.g.value(q[0], q[1], a)};
      default: {
        const Jet3 jg = sys.g.jet_unchecked(q[0], q[1], a);
        return {jg.v, jg.x};
      }
    }
  };
}

std::function<std::array<double, 4>(const std::array<double, 2>&)> make_J2(const System2D& sys,
                                                                           int which, double a) {
  return [&sys, which, a](const std::array<double, 2>& q) -> std::array<double, 4> {
    switch (which) {
      case 0: {
        const auto g1 = sys.f1.gradient(q[0], q[1], a);
        const auto g2 = sys.f2.gradient(q[0], q[1], a);
        return {g1[0], g1[1], g2[0], g2[1]};
      }
      case 1: {
        const auto g1 = sys.f1.gradient(q[0], q[1], a);
        const auto gg = sys.g.gradient(q[0], q[1], a);
        return {g1[0], g1[1], gg[0], gg[1]};
      }
      default: {
        const Jet3 jg = sys.g.jet_unchecked(q[0], q[1], a);
        return {jg.x, jg.y, jg.xx, jg.xy};
      }
    }
  };
}

}  // namespace

DeltaSet compute_deltas(const System2D& sys, Vec2 p, double alpha) {
  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 j2 = sys.f2.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  DeltaSet d;
  d.d1 = j1.x * j2.y - j1.y * j2.x;
  d.d2 = j1.x * jg.y - j1.y * jg.x;
  d.d3 = jg.y * jg.xa - jg.xy * jg.a;
  d.d4 = Mat3{{j1.x, j1.y, j1.a, j2.x, j2.y, j2.a, jg.x, jg.y, jg.a}}.det();
  d.d5 = Mat3{{j1.x, j1.y, j1.a, jg.x, jg.y, jg.a, jg.xx, jg.xy, jg.xa}}.det();
  return d;
}

std::vector<std::pair<std::string, double>> test_functions(const System2D& sys, Vec2 p,
                                                           double alpha) {
  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 j2 = sys.f2.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  const Mat2 aeq{j1.x, j1.y, jg.v * j2.x, jg.v * j2.y};
  const Mat2 aseq{j1.x, j1.y, jg.x * j2.v, jg.y * j2.v};
  const DeltaSet d = compute_deltas(sys, p, alpha);
  return {
      {"f1", j1.v},
      {"f2", j2.v},
      {"g", jg.v},
      {"g_x", jg.x},
      {"g_y", jg.y},
      {"g_xx", jg.xx},
      {"hess_g", jg.xx * jg.yy - jg.xy * jg.xy},
      {"det_eq", aeq.det()},
      {"tr_eq", aeq.trace()},
      {"disc_eq", aeq.disc()},
      {"det_seq", aseq.det()},
      {"tr_seq", aseq.trace()},
      {"disc_seq", aseq.disc()},
      {"det_f1f2", d.d1},
      {"det_f1g", d.d2},
      {"delta1", d.d1},
      {"delta2", d.d2},
      {"delta3", d.d3},
      {"delta4", d.d4},
      {"delta5", d.d5},
  };
}

UnfoldingPrediction predict_unfolding_L3(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol) {
  UnfoldingPrediction up;
  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 j2 = sys.f2.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  const DeltaSet d = compute_deltas(sys, p, alpha);

  Vec2 v_eq{}, v_seq{};
  const bool eq_ok = solve(Mat2{j1.x, j1.y, j2.x, j2.y}, Vec2{-j1.a, -j2.a}, v_eq);
  const bool seq_ok = solve(Mat2{j1.x, j1.y, jg.x, jg.y}, Vec2{-j1.a, -jg.a}, v_seq);
  if (eq_ok) up.branch_tangents.push_back({"equilibrium-branch", {v_eq.x, v_eq.y}});
  if (seq_ok) up.branch_tangents.push_back({"singular-equilibrium-branch", {v_seq.x, v_seq.y}});
  if (std::abs(d.d1) <= tol.genericity)
    up.notes.push_back("delta1 ~ 0: equilibrium branch degenerate in this family");
  if (std::abs(d.d2) <= tol.genericity)
    up.notes.push_back("delta2 ~ 0: singular-equilibrium branch degenerate in this family");
  if (std::abs(d.d4) <= tol.genericity) {
    up.notes.push_back("delta4 ~ 0: crossing not transversal; no side prediction");
    up.narrative = "equilibrium meets the singular set; transversality fails, unfolding undetermined";
    return up;
  }

  const std::string pair_pos = "a node plus a folded saddle";
  const std::string pair_neg = "a saddle plus a folded node";
  const std::string above = d.d4 > 0.0 ? pair_pos : pair_neg;
  const std::string below = d.d4 > 0.0 ? pair_neg : pair_pos;
  const std::string node_stab = j1.x < 0.0 ? "stable" : "unstable";
  up.narrative = "the equilibrium crosses the singular set: for alpha < alpha* the nearby pair is " +
                 below + ", for alpha > alpha* it is " + above +
                 "; on its existence side the node is " + node_stab +
                 " (trace -> f1_x = " + fmt(j1.x) + "), delta4 = " + fmt(d.d4);
  return up;
}

UnfoldingPrediction predict_unfolding_L4(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol) {
  UnfoldingPrediction up;
  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  const double d3 = jg.y * jg.xa - jg.xy * jg.a;
  if (std::abs(jg.y) <= tol.genericity || std::abs(jg.xxx) <= tol.genericity ||
      std::abs(d3) <= tol.genericity) {
    up.notes.push_back("degenerate cubic tangency: g_y, g_xxx or delta3 vanishes");
    up.narrative = "cubic tangency of the singular set; transversality fails, unfolding undetermined";
    return up;
  }
  const double coeff = -2.0 * d3 / (jg.y * jg.xxx);
  const double ydrift = -jg.a / jg.y;
  up.branch_tangents.push_back({"fold-pair-center", {0.0, ydrift}});
  const std::string side = coeff > 0.0 ? "alpha > alpha*" : "alpha < alpha*";
  up.narrative = "cubic tangency of the singular set: a pair of folds with opposite convexity exists for " +
                 side + ", at x ~ x* +/- sqrt(" + fmt(coeff) +
                 " * (alpha - alpha*)) and y drifting with slope " + fmt(ydrift) +
                 "; the pair collapses and vanishes at alpha*";
  up.notes.push_back("regular arc of the singular set persists through the tangency (f1 = " +
                     fmt(j1.v) + " there)");
  return up;
}

UnfoldingPrediction predict_unfolding_L5(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol) {
  UnfoldingPrediction up;
  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  const DeltaSet d = compute_deltas(sys, p, alpha);

  Vec2 v_seq{};
  const bool seq_ok = solve(Mat2{j1.x, j1.y, jg.x, jg.y}, Vec2{-j1.a, -jg.a}, v_seq);
  if (seq_ok) up.branch_tangents.push_back({"singular-equilibrium-branch", {v_seq.x, v_seq.y}});
  if (std::abs(jg.y) > tol.genericity && std::abs(jg.xx) > tol.genericity) {
    const Vec2 v_fold{-d.d3 / (jg.y * jg.xx), -jg.a / jg.y};
    up.branch_tangents.push_back({"fold-branch", {v_fold.x, v_fold.y}});
  } else {
    up.notes.push_back("fold branch tangent undefined: g_y or g_xx vanishes");
  }
  if (std::abs(d.d5) <= tol.genericity)
    up.notes.push_back("delta5 ~ 0: crossing not transversal");
  up.narrative =
      "a singular equilibrium traverses a fold of the singular set; the two branches cross "
      "transversally (delta5 = " +
      fmt(d.d5) + "), and the sector structure attached to the singular equilibrium is rebuilt "
                  "on the other side of the fold";
  return up;
}

FoldConnection detect_fold_connection(const System2D& sys, double alpha, const BBox& box,
                                      const Tol& tol) {
  FoldConnection out;

  const int gn = 24;
  std::vector<std::array<double, 2>> seeds;
  const double dx = (box.x1 - box.x0) / gn, dy = (box.y1 - box.y0) / gn;
  for (int j = 0; j < gn; ++j)
    for (int i = 0; i < gn; ++i)
      seeds.push_back({box.x0 + (i + 0.5) * dx, box.y0 + (j + 0.5) * dy});
  NewtonOptions nopt;
  nopt.f_tol = tol.newton;
  const auto res =
      multistart_newton<2>(make_F2(sys, 2, alpha), make_J2(sys, 2, alpha), seeds, nopt, Exec::Parallel);

  std::vector<Vec2> folds;
  const double slack = 1e-9 * std::max(1.0, box.diag());
  for (const auto& r : res) {
    if (!r.converged) continue;
    const Vec2 p{r.x[0], r.x[1]};
    if (!box.contains(p, slack)) continue;
    bool dup = false;
    for (const Vec2& q : folds)
      if (norm(p - q) <= 1e-8 * std::max(1.0, norm(q))) {
        dup = true;
        break;
      }
    if (dup) continue;
    if (std::holds_alternative<d2::Fold>(d2::classify_point_2d(sys, p, alpha, tol)))
      folds.push_back(p);
  }
  if (folds.size() != 2) return out;  // not the two-fold configuration
  std::sort(folds.begin(), folds.end(),
            [](Vec2 a, Vec2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  out.fold_a = folds[0];
  out.fold_b = folds[1];

  const DesingField field = build_desingularized(sys);
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_q{};
  for (const double t_end : {50.0, -50.0}) {
    const DesingOrbit orb = integrate_desing(field, alpha, out.fold_a, t_end, box);
    for (const auto& st : orb.orbit.steps) {
      for (int k = 0; k <= 8; ++k) {
        const auto y = st.interp(st.t0 + (st.t1 - st.t0) * (k / 8.0));
        const Vec2 q{y[0], y[1]};
        const double dist = norm(q - out.fold_b);
        if (dist < best) {
          best = dist;
          best_q = q;
        }
      }
    }
  }
  out.miss_distance = best;
  const double dab = norm(out.fold_a - out.fold_b);
  if (!(best <= 0.5 * dab)) return out;  // orbit never came near the target fold

  out.applicable = true;
  const Jet3 jg = sys.g.jet(best_q.x, best_q.y, alpha);
  const double gn2 = std::hypot(jg.x, jg.y);
  out.clearance = jg.v / std::max(gn2, 1e-300);
  out.connected = best <= 1e-6 * std::max(1.0, dab);
  return out;
}

// ---------------------------------------------------------------------------
// Event post-processing shared by both sweeps

namespace {

// A root with failing transversality is located only to about the square
// root of the Newton residual tolerance, so the multistart solver returns a
// cloud of near-copies of it.  Collapse flagged events of the same code
// within that uncertainty onto the most degenerate member (the one nearest
// the true critical point, where the transversality measure bottoms out).
void collapse_degenerate_clusters(std::vector<BifEvent>& events) {
  std::vector<BifEvent> kept;
  std::vector<char> used(events.size(), 0);
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    if (!events[i].genericity_warning) {
      kept.push_back(std::move(events[i]));
      continue;
    }
    const double sc =
        std::max({1.0, std::abs(events[i].alpha), std::abs(events[i].p.x), std::abs(events[i].p.y)});
    std::size_t best = i;
    int count = 1;
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (used[j] || !events[j].genericity_warning || events[j].code != events[i].code) continue;
      if (std::max({std::abs(events[j].alpha - events[i].alpha),
                    std::abs(events[j].p.x - events[i].p.x),
                    std::abs(events[j].p.y - events[i].p.y)}) > 1e-5 * sc)
        continue;
      used[j] = 1;
      ++count;
      if (std::abs(events[j].genericity) < std::abs(events[best].genericity)) best = j;
    }
    BifEvent rep = std::move(events[best]);
    if (count > 1)
      rep.notes.push_back("merged " + std::to_string(count) +
                          " nearby degenerate solutions of the same defining system; the "
                          "location is accurate only to the degeneracy scale");
    kept.push_back(std::move(rep));
  }
  events = std::move(kept);
}

void warn_weak_events(const std::vector<BifEvent>& events, std::vector<std::string>& warnings) {
  for (const BifEvent& ev : events)
    if (ev.genericity_warning)
      warnings.push_back(std::string(d2::code_name(ev.code)) + " at alpha = " + fmt(ev.alpha) +
                         ": weak transversality (" + fmt(ev.genericity) + ")");
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter sweep (2D)

ScanResult scan_parameter(const System2D& sys, Interval arange, const BBox& box,
                          const ScanOptions& opt) {
  ScanResult out;
  const Tol& tol = opt.tol;
  const Symbols S(sys);
  const double eps = std::max(1e-5, std::min(1e-2, 0.05 * arange.length()));
  NewtonOptions nopt;
  nopt.f_tol = tol.newton;

  auto finish_event = [&](BifEvent ev) {
    if (std::abs(ev.genericity) < tol.genericity) {
      ev.genericity_warning = true;
      ev.notes.push_back("transversality below hard threshold: effectively degenerate "
                         "(codimension two or worse in this family)");
    } else if (std::abs(ev.genericity) < tol.genericity_warn) {
      ev.genericity_warning = true;
    }
    out.events.push_back(std::move(ev));
  };

  // Continue one of the defining 2-systems to a nearby alpha and classify.
  auto continue_root = [&](int which, Vec2 seed, double a) -> std::optional<Vec2> {
    const auto r = damped_newton<2>(make_F2(sys, which, a), make_J2(sys, which, a),
                                    {seed.x, seed.y}, nopt);
    if (!r.converged) return std::nullopt;
    const Vec2 q{r.x[0], r.x[1]};
    if (norm(q - seed) > 0.5 * std::max(1.0, box.diag())) return std::nullopt;
    return q;
  };

  // Distinct roots of a defining system within `radius` of `center`.
  auto roots_near = [&](int which, Vec2 center, double a,
                        double radius) -> std::vector<std::pair<Vec2, d2::Point2DClass>> {
    std::vector<std::array<double, 2>> seeds{{center.x, center.y}};
    for (int ring = 1; ring <= 2; ++ring)
      for (int k = 0; k < 8; ++k) {
        const double th = 2.0 * 3.14159265358979323846 * k / 8.0;
        const double r = radius * (ring == 1 ? 0.35 : 0.8);
        seeds.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th)});
      }
    const auto res = multistart_newton<2>(make_F2(sys, which, a), make_J2(sys, which, a), seeds,
                                          nopt, Exec::Serial);
    std::vector<std::pair<Vec2, d2::Point2DClass>> found;
    for (const auto& r : res) {
      if (!r.converged) continue;
      const Vec2 p{r.x[0], r.x[1]};
      if (norm(p - center) > radius) continue;
      bool dup = false;
      for (const auto& q : found)
        if (norm(p - q.first) <= 1e-7 * std::max(1.0, norm(p))) {
          dup = true;
          break;
        }
      if (!dup) found.push_back({p, d2::classify_point_2d(sys, p, a, tol)});
    }
    return found;
  };
  const double rloc = std::min(0.25 * box.diag(), 3.0 * std::sqrt(eps));

  auto kinds_of = [](const std::vector<std::pair<Vec2, d2::Point2DClass>>& v) {
    std::string s;
    for (const auto& [p, c] : v) {
      if (!s.empty()) s += ", ";
      s += d2::class_name(c);
    }
    return s.empty() ? std::string("none") : s;
  };

  const DesingField field = build_desingularized(sys);

  // Cycle confirmation for the eigenvalue-pair events.
  auto confirm_cycle = [&](Vec2 center, BifEvent& ev) {
    if (!opt.cycles) return;
    for (const double da : {-1e-2, 1e-2}) {
      const double a = ev.alpha + da;
      const int which = static_cast<int>(ev.test_values.front().second);
      const auto eq = continue_root(which, center, a);
      Vec2 base = eq.value_or(center);
      Vec2 seed = base + Vec2{0.15 * std::max(1.0, norm(base)), 0.0};
      seed.x = std::clamp(seed.x, box.x0, box.x1);
      seed.y = std::clamp(seed.y, box.y0, box.y1);
      const LimitCycleResult lc = find_limit_cycle(field, a, seed, box);
      if (lc.found) {
        ev.notes.push_back("periodic orbit confirmed at alpha = " + fmt(a) + ": period " +
                           fmt(lc.period) + ", multiplier " + fmt(lc.multiplier) +
                           (lc.folded ? ", crosses the singular set (" +
                                            std::to_string(lc.sigma_crossings) + " crossings)"
                                      : ", does not cross the singular set"));
      } else {
        ev.notes.push_back("no periodic orbit detected empirically at alpha = " + fmt(a));
      }
    }
  };

  // --- T1 / T2: critical point of g on the singular set --------------------
  for (const Root3& r : solve_extended({S.g, S.gx, S.gy}, box, arange, opt.grid_n, tol, opt.exec)) {
    const Jet3 jg = sys.g.jet(r.p.x, r.p.y, r.alpha);
    const double hdet = jg.xx * jg.yy - jg.xy * jg.xy;
    BifEvent ev;
    ev.code = hdet < 0.0 ? BifCode::T1 : BifCode::T2;
    ev.p = r.p;
    ev.alpha = r.alpha;
    ev.genericity = std::abs(r.det_jext);
    ev.test_values = test_functions(sys, r.p, r.alpha);
    ev.test_values.push_back({"g_alpha", jg.a});
    ev.test_values.push_back({"det_ext", r.det_jext});
    if (ev.code == BifCode::T1) {
      ev.unfolding =
          "two branches of the singular set touch at alpha* and reconnect across the other "
          "diagonal; the four adjoining arcs exchange their incoming/outgoing pairing";
    } else {
      const bool above = jg.a * jg.xx < 0.0;
      ev.unfolding = std::string("an isolated oval of the singular set exists for ") +
                     (above ? "alpha > alpha*" : "alpha < alpha*") +
                     ", shrinks to the point " + fmt_pt(r.p) + " at alpha*, and is absent on the "
                     "other side";
    }
    finish_event(std::move(ev));
  }

  // --- L1: zero eigenvalue at an equilibrium -------------------------------
  for (const Root3& r :
       solve_extended({S.f1, S.f2, S.det_eq}, box, arange, opt.grid_n, tol, opt.exec)) {
    const double gval = sys.g.value(r.p.x, r.p.y, r.alpha);
    if (std::abs(gval) <= tol.merge_radius()) continue;  // the L3 system reports this point
    BifEvent ev;
    ev.code = BifCode::L1;
    ev.p = r.p;
    ev.alpha = r.alpha;
    ev.genericity = std::abs(r.det_jext);
    ev.test_values = test_functions(sys, r.p, r.alpha);
    ev.test_values.push_back({"det_ext", r.det_jext});
    const auto lo = roots_near(0, r.p, r.alpha - eps, rloc);
    const auto hi = roots_near(0, r.p, r.alpha + eps, rloc);
    if (lo.size() == 2 && hi.empty())
      ev.unfolding = "two equilibria (" + kinds_of(lo) +
                     ") collide at alpha* and disappear for alpha > alpha*";
    else if (hi.size() == 2 && lo.empty())
      ev.unfolding = "two equilibria (" + kinds_of(hi) +
                     ") emerge for alpha > alpha* out of the collision at alpha*";
    else if (lo.size() == 1 && hi.size() == 1)
      ev.unfolding = "an eigenvalue crosses zero: the equilibrium changes from " + kinds_of(lo) +
                     " to " + kinds_of(hi) + " across alpha*";
    else
      ev.unfolding = "equilibrium configuration changes across alpha*: [" + kinds_of(lo) +
                     "] -> [" + kinds_of(hi) + "]";
    finish_event(std::move(ev));
  }

  // --- L7: imaginary eigenvalue pair at an equilibrium ---------------------
  for (const Root3& r :
       solve_extended({S.f1, S.f2, S.tr_eq}, box, arange, opt.grid_n, tol, opt.exec)) {
    const Jet3 j1 = sys.f1.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 j2 = sys.f2.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 jg = sys.g.jet(r.p.x, r.p.y, r.alpha);
    const Mat2 aeq{j1.x, j1.y, jg.v * j2.x, jg.v * j2.y};
    if (!(aeq.det() > tol.deriv)) continue;  // real eigenvalues: trace zero is no transition
    BifEvent ev;
    ev.code = BifCode::L7;
    ev.p = r.p;
    ev.alpha = r.alpha;
    ev.genericity = std::abs(r.det_jext);
    ev.test_values = {{"which", 0.0}};  // teaches confirm_cycle which branch to continue
    auto tv = test_functions(sys, r.p, r.alpha);
    ev.test_values.insert(ev.test_values.end(), tv.begin(), tv.end());
    ev.test_values.push_back({"det_ext", r.det_jext});
    std::string lo_name = "?", hi_name = "?";
    if (auto q = continue_root(0, r.p, r.alpha - eps))
      lo_name = d2::class_name(d2::classify_point_2d(sys, *q, r.alpha - eps, tol));
    if (auto q = continue_root(0, r.p, r.alpha + eps))
      hi_name = d2::class_name(d2::classify_point_2d(sys, *q, r.alpha + eps, tol));
    ev.unfolding = "a complex eigenvalue pair crosses the imaginary axis: " + lo_name +
                   " for alpha < alpha*, " + hi_name +
                   " for alpha > alpha*; a small periodic orbit is born on one side";
    confirm_cycle(r.p, ev);
    finish_event(std::move(ev));
  }

  // --- L3: equilibrium on the singular set ---------------------------------
  for (const Root3& r : solve_extended({S.f1, S.f2, S.g}, box, arange, opt.grid_n, tol, opt.exec)) {
    BifEvent ev;
    ev.code = BifCode::L3;
    ev.p = r.p;
    ev.alpha = r.alpha;
    const DeltaSet d = compute_deltas(sys, r.p, r.alpha);
    ev.genericity = std::abs(d.d4);
    ev.test_values = test_functions(sys, r.p, r.alpha);
    const UnfoldingPrediction up = predict_unfolding_L3(sys, r.p, r.alpha, tol);
    ev.unfolding = up.narrative;
    for (const auto& n : up.notes) ev.notes.push_back(n);

    // Verify the predicted side assignment against direct classification of
    // both continued branches.
    if (std::abs(d.d4) > tol.genericity) {
      bool verified = true;
      std::string detail;
      for (const double da : {-eps, eps}) {
        const double a = r.alpha + da;
        const auto eq = continue_root(0, r.p, a);
        const auto sq = continue_root(1, r.p, a);
        if (!eq || !sq) {
          verified = false;
          detail = "branch continuation failed at alpha = " + fmt(a);
          break;
        }
        const auto ceq = d2::classify_point_2d(sys, *eq, a, tol);
        const auto csq = d2::classify_point_2d(sys, *sq, a, tol);
        const bool want_node = d.d4 * da > 0.0;  // else saddle + folded node
        const auto* e = std::get_if<d2::Equilibrium>(&ceq);
        const auto* s = std::get_if<d2::SingularEquilibrium2D>(&csq);
        const bool ok =
            e && s &&
            (want_node ? (e->kind == d2::EqKind::Node && s->kind == d2::SEqKind::FoldedSaddle)
                       : (e->kind == d2::EqKind::Saddle && s->kind == d2::SEqKind::FoldedNode));
        if (!ok) {
          verified = false;
          detail = "alpha = " + fmt(a) + ": observed (" + d2::class_name(ceq) + ", " +
                   d2::class_name(csq) + ")";
          break;
        }
      }
      if (verified)
        ev.notes.push_back(
            "side assignment verified against direct eigenvalue classification at alpha* +/- " +
            fmt(eps));
      else {
        ev.notes.push_back("side-assignment verification discrepancy: " + detail);
        out.warnings.push_back("L3 at alpha = " + fmt(r.alpha) +
                               ": unfolding verification discrepancy (" + detail + ")");
      }
    }
    finish_event(std::move(ev));
  }

  // --- L2: zero eigenvalue at a singular equilibrium -----------------------
  for (const Root3& r :
       solve_extended({S.f1, S.g, S.det_f1g}, box, arange, opt.grid_n, tol, opt.exec)) {
    const double f2v = sys.f2.value(r.p.x, r.p.y, r.alpha);
    if (std::abs(f2v) <= tol.merge_radius()) continue;  // coincides with L3
    BifEvent ev;
    ev.code = BifCode::L2;
    ev.p = r.p;
    ev.alpha = r.alpha;
    ev.genericity = std::abs(r.det_jext);
    ev.test_values = test_functions(sys, r.p, r.alpha);
    ev.test_values.push_back({"det_ext", r.det_jext});
    const auto lo = roots_near(1, r.p, r.alpha - eps, rloc);
    const auto hi = roots_near(1, r.p, r.alpha + eps, rloc);
    if (lo.size() == 2 && hi.empty())
      ev.unfolding = "two singular equilibria (" + kinds_of(lo) +
                     ") collide at alpha* and disappear for alpha > alpha*";
    else if (hi.size() == 2 && lo.empty())
      ev.unfolding = "two singular equilibria (" + kinds_of(hi) +
                     ") emerge for alpha > alpha* out of the collision at alpha*";
    else
      ev.unfolding = "singular-equilibrium configuration changes across alpha*: [" + kinds_of(lo) +
                     "] -> [" + kinds_of(hi) + "]";
    finish_event(std::move(ev));
  }

  // --- L6: folded node <-> folded focus ------------------------------------
  for (const Root3& r :
       solve_extended({S.f1, S.g, S.disc_seq}, box, arange, opt.grid_n, tol, opt.exec)) {
    const Jet3 j1 = sys.f1.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 j2 = sys.f2.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 jg = sys.g.jet(r.p.x, r.p.y, r.alpha);
    const Mat2 aseq{j1.x, j1.y, jg.x * j2.v, jg.y * j2.v};
    if (std::abs(aseq.trace()) <= tol.deriv) continue;  // degenerate: overlaps L8
    BifEvent ev;
    ev.code = BifCode::L6;
    ev.p = r.p;
    ev.alpha = r.alpha;
    ev.genericity = std::abs(r.det_jext);
    ev.test_values = test_functions(sys, r.p, r.alpha);
    ev.test_values.push_back({"det_ext", r.det_jext});
    std::string lo_name = "?", hi_name = "?";
    if (auto q = continue_root(1, r.p, r.alpha - eps))
      lo_name = d2::class_name(d2::classify_point_2d(sys, *q, r.alpha - eps, tol));
    if (auto q = continue_root(1, r.p, r.alpha + eps))
      hi_name = d2::class_name(d2::classify_point_2d(sys, *q, r.alpha + eps, tol));
    ev.unfolding = "the singular-equilibrium eigenvalues collide: " + lo_name +
                   " for alpha < alpha*, " + hi_name + " for alpha > alpha*";
    finish_event(std::move(ev));
  }

  // --- L8: imaginary pair at a singular equilibrium ------------------------
  for (const Root3& r :
       solve_extended({S.f1, S.g, S.tr_seq}, box, arange, opt.grid_n, tol, opt.exec)) {
    const Jet3 j1 = sys.f1.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 j2 = sys.f2.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 jg = sys.g.jet(r.p.x, r.p.y, r.alpha);
    const Mat2 aseq{j1.x, j1.y, jg.x * j2.v, jg.y * j2.v};
    if (!(aseq.det() > tol.deriv)) continue;
    BifEvent ev;
    ev.code = BifCode::L8;
    ev.p = r.p;
    ev.alpha = r.alpha;
    ev.genericity = std::abs(r.det_jext);
    ev.test_values = {{"which", 1.0}};
    auto tv = test_functions(sys, r.p, r.alpha);
    ev.test_values.insert(ev.test_values.end(), tv.begin(), tv.end());
    ev.test_values.push_back({"det_ext", r.det_jext});
    ev.unfolding =
        "the folded focus reverses winding stability; a small periodic orbit crossing the "
        "singular set twice is born on one side of alpha*";
    confirm_cycle(r.p, ev);
    finish_event(std::move(ev));
  }

  // --- L5: singular equilibrium meets a fold -------------------------------
  for (const Root3& r : solve_extended({S.f1, S.g, S.gx}, box, arange, opt.grid_n, tol, opt.exec)) {
    const double f2v = sys.f2.value(r.p.x, r.p.y, r.alpha);
    if (std::abs(f2v) <= tol.merge_radius()) continue;  // coincides with L3
    BifEvent ev;
    ev.code = BifCode::L5;
    ev.p = r.p;
    ev.alpha = r.alpha;
    const DeltaSet d = compute_deltas(sys, r.p, r.alpha);
    ev.genericity = std::abs(d.d5);
    ev.test_values = test_functions(sys, r.p, r.alpha);
    const UnfoldingPrediction up = predict_unfolding_L5(sys, r.p, r.alpha, tol);
    ev.unfolding = up.narrative;
    for (const auto& n : up.notes) ev.notes.push_back(n);
    std::string lo_name = "?", hi_name = "?";
    if (auto q = continue_root(1, r.p, r.alpha - eps))
      lo_name = d2::class_name(d2::classify_point_2d(sys, *q, r.alpha - eps, tol));
    if (auto q = continue_root(1, r.p, r.alpha + eps))
      hi_name = d2::class_name(d2::classify_point_2d(sys, *q, r.alpha + eps, tol));
    ev.notes.push_back("singular equilibrium observed as " + lo_name + " at alpha* - " + fmt(eps) +
                       " and " + hi_name + " at alpha* + " + fmt(eps));
    finish_event(std::move(ev));
  }

  // --- L4: cubic tangency of the singular set ------------------------------
  for (const Root3& r : solve_extended({S.g, S.gx, S.gxx}, box, arange, opt.grid_n, tol, opt.exec)) {
    const Jet3 j1 = sys.f1.jet(r.p.x, r.p.y, r.alpha);
    const Jet3 jg = sys.g.jet(r.p.x, r.p.y, r.alpha);
    if (std::abs(j1.v) <= tol.merge_radius()) continue;   // overlaps L5 degeneracy
    if (std::abs(jg.y) <= tol.deriv) continue;            // overlaps T events
    BifEvent ev;
    ev.code = BifCode::L4;
    ev.p = r.p;
    ev.alpha = r.alpha;
    const double d3 = jg.y * jg.xa - jg.xy * jg.a;
    ev.genericity = std::min({std::abs(d3), std::abs(jg.y), std::abs(jg.xxx)});
    ev.test_values = test_functions(sys, r.p, r.alpha);
    ev.test_values.push_back({"g_xxx", jg.xxx});
    ev.test_values.push_back({"det_ext", r.det_jext});
    const UnfoldingPrediction up = predict_unfolding_L4(sys, r.p, r.alpha, tol);
    ev.unfolding = up.narrative;
    for (const auto& n : up.notes) ev.notes.push_back(n);
    finish_event(std::move(ev));
  }

  // --- L9: cycle fold (unit multiplier), tracked along alpha ---------------
  if (opt.cycles) {
    const int M = std::max(2, opt.alpha_samples);
    struct CycleSample {
      bool found = false;
      LimitCycleResult lc;
    };
    std::vector<CycleSample> table(M);
    std::optional<Vec2> cont;
    const Vec2 c = box.center();
    const double rx = 0.25 * (box.x1 - box.x0), ry = 0.25 * (box.y1 - box.y0);
    const std::vector<Vec2> fallback = {c + Vec2{rx, 0.0}, c + Vec2{0.0, ry}, c - Vec2{rx, 0.0}, c};

    auto cycle_at = [&](double a, std::optional<Vec2> hint) -> CycleSample {
      std::vector<Vec2> cands;
      if (hint) cands.push_back(*hint);
      cands.insert(cands.end(), fallback.begin(), fallback.end());
      for (const Vec2& s : cands) {
        const LimitCycleResult lc = find_limit_cycle(field, a, s, box);
        if (lc.found) return {true, lc};
      }
      return {};
    };
    auto radius_of = [](const LimitCycleResult& lc) {
      Vec2 cen{};
      for (const Vec2& q : lc.pts) cen = cen + q;
      cen = (1.0 / std::max<std::size_t>(1, lc.pts.size())) * cen;
      double r = 0.0;
      for (const Vec2& q : lc.pts) r = std::max(r, norm(q - cen));
      return r;
    };

    for (int i = 0; i < M; ++i) {
      const double a = arange.lo + arange.length() * i / (M - 1);
      table[i] = cycle_at(a, cont);
      if (table[i].found) cont = table[i].lc.section_point;
    }

    for (int i = 0; i + 1 < M; ++i) {
      const double a0 = arange.lo + arange.length() * i / (M - 1);
      const double a1 = arange.lo + arange.length() * (i + 1) / (M - 1);
      const CycleSample& s0 = table[i];
      const CycleSample& s1 = table[i + 1];

      if (s0.found && s1.found && (s0.lc.multiplier - 1.0) * (s1.lc.multiplier - 1.0) < 0.0) {
        // Multiplier crosses one with the cycle persisting: bisect on mu - 1.
        double lo = a0, hi = a1, mu_lo = s0.lc.multiplier, mu_hi = s1.lc.multiplier;
        Vec2 seed = s0.lc.section_point;
        LimitCycleResult at_root = s0.lc;
        double a_root = 0.5 * (lo + hi);
        for (int it = 0; it < 30; ++it) {
          a_root = 0.5 * (lo + hi);
          const CycleSample sm = cycle_at(a_root, seed);
          if (!sm.found) break;
          seed = sm.lc.section_point;
          at_root = sm.lc;
          if ((sm.lc.multiplier - 1.0) * (mu_lo - 1.0) > 0.0) {
            lo = a_root;
            mu_lo = sm.lc.multiplier;
          } else {
            hi = a_root;
            mu_hi = sm.lc.multiplier;
          }
          if (std::abs(sm.lc.multiplier - 1.0) <= 1e-8 || hi - lo <= 1e-10) break;
        }
        BifEvent ev;
        ev.code = BifCode::L9;
        ev.alpha = a_root;
        ev.p = at_root.section_point;
        ev.genericity = std::abs((mu_hi - mu_lo) / std::max(hi - lo, 1e-300));
        ev.test_values = {{"multiplier", at_root.multiplier},
                          {"period", at_root.period},
                          {"sigma_crossings", static_cast<double>(at_root.sigma_crossings)}};
        ev.unfolding =
            "a periodic orbit reaches unit multiplier: an attracting and a repelling cycle "
            "collide and annihilate (fold of cycles)";
        if (at_root.folded) ev.notes.push_back("the cycle crosses the singular set");
        finish_event(std::move(ev));
      } else if (s0.found != s1.found) {
        // Existence boundary: bisect, then decide what it is.
        double lo = a0, hi = a1;
        bool lo_found = s0.found;
        LimitCycleResult last = s0.found ? s0.lc : s1.lc;
        Vec2 seed = last.section_point;
        for (int it = 0; it < 25; ++it) {
          const double am = 0.5 * (lo + hi);
          const CycleSample sm = cycle_at(am, seed);
          if (sm.found == lo_found) {
            lo = am;
          } else {
            hi = am;
          }
          if (sm.found) {
            last = sm.lc;
            seed = sm.lc.section_point;
          }
          if (hi - lo <= 1e-8 * std::max(1.0, std::abs(am))) break;
        }
        const double a_star = 0.5 * (lo + hi);
        const double rad = radius_of(last);
        if (rad < 0.05 * std::max(1.0, norm(last.section_point))) {
          out.warnings.push_back(
              "periodic orbit shrinks to a point near alpha = " + fmt(a_star) +
              " (cycle birth/death at an eigenvalue event; see the matching L7/L8 entry)");
        } else if (std::abs(last.multiplier - 1.0) <= 0.01) {
          BifEvent ev;
          ev.code = BifCode::L9;
          ev.alpha = a_star;
          ev.p = last.section_point;
          ev.genericity = std::abs(last.multiplier - 1.0);
          ev.test_values = {{"multiplier", last.multiplier},
                            {"period", last.period},
                            {"sigma_crossings", static_cast<double>(last.sigma_crossings)}};
          ev.unfolding =
              "a periodic orbit reaches unit multiplier and disappears: fold of cycles at the "
              "edge of the cycle's existence interval";
          if (last.folded) ev.notes.push_back("the cycle crosses the singular set");
          finish_event(std::move(ev));
        } else {
          out.warnings.push_back("periodic orbit disappears near alpha = " + fmt(a_star) +
                                 " with multiplier " + fmt(last.multiplier) +
                                 " (not a unit-multiplier fold; possible global transition)");
        }
      }
    }
  }

  // --- G6: fold-to-fold connection, tracked along alpha --------------------
  if (opt.connections) {
    const int M = std::max(2, opt.alpha_samples);
    std::vector<std::pair<double, FoldConnection>> table;
    for (int i = 0; i < M; ++i) {
      const double a = arange.lo + arange.length() * i / (M - 1);
      table.push_back({a, detect_fold_connection(sys, a, box, tol)});
    }
    for (int i = 0; i + 1 < M; ++i) {
      const auto& [a0, c0] = table[i];
      const auto& [a1, c1] = table[i + 1];
      if (!c0.applicable || !c1.applicable) continue;
      if (!(c0.clearance * c1.clearance < 0.0)) continue;
      double lo = a0, hi = a1, cl_lo = c0.clearance, cl_hi = c1.clearance;
      FoldConnection best = c0;
      double a_root = 0.5 * (lo + hi);
      for (int it = 0; it < 40; ++it) {
        a_root = 0.5 * (lo + hi);
        const FoldConnection cm = detect_fold_connection(sys, a_root, box, tol);
        if (!cm.applicable) break;
        best = cm;
        if (cm.clearance * cl_lo > 0.0) {
          lo = a_root;
          cl_lo = cm.clearance;
        } else {
          hi = a_root;
          cl_hi = cm.clearance;
        }
        if (std::abs(cm.clearance) <= 1e-10 || hi - lo <= 1e-11) break;
      }
      BifEvent ev;
      ev.code = BifCode::G6FoldFold;
      ev.alpha = a_root;
      ev.p = best.fold_b;
      ev.genericity = std::abs((cl_hi - cl_lo) / std::max(hi - lo, 1e-300));
      ev.test_values = {{"clearance", best.clearance},
                        {"miss_distance", best.miss_distance},
                        {"fold_a_x", best.fold_a.x},
                        {"fold_a_y", best.fold_a.y},
                        {"fold_b_x", best.fold_b.x},
                        {"fold_b_y", best.fold_b.y}};
      const std::string lo_side = cl_lo > 0.0 ? "g > 0" : "g < 0";
      const std::string hi_side = cl_hi > 0.0 ? "g > 0" : "g < 0";
      ev.unfolding = "the companion orbit through the fold at " + fmt_pt(best.fold_a) +
                     " passes the fold at " + fmt_pt(best.fold_b) + " on the " + lo_side +
                     " side for alpha < alpha* and on the " + hi_side +
                     " side for alpha > alpha*; at alpha* the two folds are connected";
      finish_event(std::move(ev));
    }
  }

  // Collapse degenerate root clouds, order, then flag near-coincident events
  // of different kinds.
  collapse_degenerate_clusters(out.events);
  warn_weak_events(out.events, out.warnings);
  std::sort(out.events.begin(), out.events.end(), [](const BifEvent& a, const BifEvent& b) {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.code != b.code) return static_cast<int>(a.code) < static_cast<int>(b.code);
    return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
  });
  for (std::size_t i = 0; i < out.events.size(); ++i)
    for (std::size_t j = i + 1; j < out.events.size(); ++j) {
      const BifEvent& a = out.events[i];
      const BifEvent& b = out.events[j];
      const double sc = std::max({1.0, std::abs(a.alpha), norm(a.p)});
      if (std::abs(a.alpha - b.alpha) <= 1e-6 * sc && norm(a.p - b.p) <= 1e-6 * sc)
        out.warnings.push_back(std::string("events ") + d2::code_name(a.code) + " and " +
                               d2::code_name(b.code) + " coincide at alpha = " + fmt(a.alpha) +
                               ", " + fmt_pt(a.p) + " (higher-codimension point?)");
    }
  return out;
}

// ---------------------------------------------------------------------------
// Parameter sweep (1D)

ScanResult scan_parameter_1d(const System1D& sys, Interval arange, Interval xrange,
                             const Scan1DOptions& opt) {
  ScanResult out;
  const Tol& tol = opt.tol;
  const double eps = std::max(1e-5, std::min(1e-2, 0.05 * arange.length()));

  auto finish_event = [&](BifEvent ev) {
    if (std::abs(ev.genericity) < tol.genericity) {
      ev.genericity_warning = true;
      ev.notes.push_back("transversality below hard threshold: effectively degenerate "
                         "(codimension two or worse in this family)");
    } else if (std::abs(ev.genericity) < tol.genericity_warn) {
      ev.genericity_warning = true;
    }
    out.events.push_back(std::move(ev));
  };

  // Defining systems in (x, alpha).  which: 0 = (f, f_x), 1 = (g, g_x),
  // 2 = (f, g).
  auto F2 = [&](int which) {
    return [&, which](const std::array<double, 2>& q) -> std::array<double, 2> {
      const Jet3 jf = sys.f.jet_unchecked(q[0], 0.0, q[1]);
      const Jet3 jg = sys.g.jet_unchecked(q[0], 0.0, q[1]);
      switch (which) {
        case 0: return {jf.v, jf.x};
        case 1: return {jg.v, jg.x};
        default: return {jf.v, jg.v};
      }
    };
  };
  auto J2 = [&](int which) {
    return [&, which](const std::array<double, 2>& q) -> std::array<double, 4> {
      const Jet3 jf = sys.f.jet_unchecked(q[0], 0.0, q[1]);
      const Jet3 jg = sys.g.jet_unchecked(q[0], 0.0, q[1]);
      switch (which) {
        case 0: return {jf.x, jf.a, jf.xx, jf.xa};
        case 1: return {jg.x, jg.a, jg.xx, jg.xa};
        default: return {jf.x, jf.a, jg.x, jg.a};
      }
    };
  };

  std::vector<std::array<double, 2>> seeds;
  const double dx = xrange.length() / opt.grid_n, da = arange.length() / opt.grid_n;
  for (int k = 0; k < opt.grid_n; ++k)
    for (int i = 0; i < opt.grid_n; ++i)
      seeds.push_back({xrange.lo + (i + 0.5) * dx, arange.lo + (k + 0.5) * da});
  NewtonOptions nopt;
  nopt.f_tol = tol.newton;

  auto solve_1d = [&](int which) {
    std::vector<std::pair<double, double>> roots;  // (x, alpha)
    const auto res = multistart_newton<2>(F2(which), J2(which), seeds, nopt, Exec::Serial);
    const double xsl = 1e-9 * std::max(1.0, xrange.length());
    const double asl = 1e-9 * std::max(1.0, arange.length());
    for (const auto& r : res) {
      if (!r.converged) continue;
      const double x = r.x[0], a = r.x[1];
      if (!xrange.contains(x, xsl) || !arange.contains(a, asl)) continue;
      const double sc = std::max({1.0, std::abs(x), std::abs(a)});
      bool dup = false;
      for (const auto& q : roots)
        if (std::max(std::abs(q.first - x), std::abs(q.second - a)) <= 1e-8 * sc) {
          dup = true;
          break;
        }
      if (!dup) roots.push_back({x, a});
    }
    std::sort(roots.begin(), roots.end(),
              [](const auto& a, const auto& b) { return a.second != b.second ? a.second < b.second : a.first < b.first; });
    return roots;
  };

  auto det_ext_at = [&](int which, double x, double a) {
    const auto j = J2(which)({x, a});
    return Mat2{j[0], j[1], j[2], j[3]}.det();
  };

  auto local_window = [&](double x) {
    const double w = 0.1 * xrange.length();
    return Interval{std::max(xrange.lo, x - w), std::min(xrange.hi, x + w)};
  };
  auto listing = [&](double a, Interval win) {
    const auto found = d1::find_special_points_1d(sys, a, win, 256, tol);
    std::string s;
    for (const auto& sp : found.points) {
      if (!s.empty()) s += "; ";
      s += "x = " + fmt(sp.x) + " " + d1::class_name(sp.cls);
    }
    return s.empty() ? std::string("no special points") : s;
  };

  // A1.1: equilibrium fold (f = f_x = 0, g != 0)
  for (const auto& [x, a] : solve_1d(0)) {
    if (std::abs(sys.g.value(x, 0.0, a)) <= tol.merge_radius()) continue;
    const d1::NormalForm1D nf = d1::normal_form_A11(sys, x, a, tol);
    BifEvent ev;
    ev.code = BifCode::A11;
    ev.p = {x, 0.0};
    ev.alpha = a;
    ev.genericity = std::abs(det_ext_at(0, x, a));
    const Jet3 jf = sys.f.jet(x, 0.0, a);
    ev.test_values = {{"f_xx", jf.xx},
                      {"f_alpha", jf.a},
                      {"g", sys.g.value(x, 0.0, a)},
                      {"s", static_cast<double>(nf.s)},
                      {"dbeta_dalpha", nf.dbeta_dalpha}};
    const bool above = nf.s * nf.dbeta_dalpha < 0.0;
    ev.unfolding = std::string("a pair of simple equilibria (one stable, one unstable) exists for ") +
                   (above ? "alpha > alpha*" : "alpha < alpha*") +
                   " and collides and disappears at alpha*";
    if (!nf.note.empty()) ev.notes.push_back(nf.note);
    if (nf.degenerate) ev.genericity = 0.0;
    finish_event(std::move(ev));
  }

  // A2.1: singularity fold (g = g_x = 0, f != 0)
  for (const auto& [x, a] : solve_1d(1)) {
    if (std::abs(sys.f.value(x, 0.0, a)) <= tol.merge_radius()) continue;
    const d1::NormalForm1D nf = d1::normal_form_A21(sys, x, a, tol);
    BifEvent ev;
    ev.code = BifCode::A21;
    ev.p = {x, 0.0};
    ev.alpha = a;
    ev.genericity = std::abs(det_ext_at(1, x, a));
    const Jet3 jg = sys.g.jet(x, 0.0, a);
    ev.test_values = {{"g_xx", jg.xx},
                      {"g_alpha", jg.a},
                      {"f", sys.f.value(x, 0.0, a)},
                      {"s", static_cast<double>(nf.s)},
                      {"dbeta_dalpha", nf.dbeta_dalpha}};
    const bool above = nf.s * nf.dbeta_dalpha < 0.0;
    ev.unfolding =
        std::string("a pair of simple singular points (one outgoing, one incoming) exists for ") +
        (above ? "alpha > alpha*" : "alpha < alpha*") + " and collides and disappears at alpha*";
    if (!nf.note.empty()) ev.notes.push_back(nf.note);
    if (nf.degenerate) ev.genericity = 0.0;
    finish_event(std::move(ev));
  }

  // A3.0,0: equilibrium crosses a singular point (f = g = 0)
  for (const auto& [x, a] : solve_1d(2)) {
    const Jet3 jf = sys.f.jet(x, 0.0, a);
    const Jet3 jg = sys.g.jet(x, 0.0, a);
    if (std::abs(jf.x) <= tol.deriv || std::abs(jg.x) <= tol.deriv) continue;  // not simple
    const d1::NormalForm1D nf = d1::normal_form_A300(sys, x, a, tol);
    BifEvent ev;
    ev.code = BifCode::A300;
    ev.p = {x, 0.0};
    ev.alpha = a;
    ev.genericity = std::abs(nf.A);
    ev.test_values = {{"f_x", jf.x},
                      {"g_x", jg.x},
                      {"A", nf.A},
                      {"s", static_cast<double>(nf.s)},
                      {"dbeta_dalpha", nf.dbeta_dalpha}};
    ev.unfolding =
        "the equilibrium and the singular point cross at alpha*: both reverse character "
        "(the equilibrium flips stability, the singular point flips between incoming and "
        "outgoing); dbeta/dalpha = " +
        fmt(nf.dbeta_dalpha);
    const Interval win = local_window(x);
    ev.notes.push_back("alpha = " + fmt(a - eps) + ": " + listing(a - eps, win));
    ev.notes.push_back("alpha = " + fmt(a + eps) + ": " + listing(a + eps, win));
    if (!nf.note.empty()) ev.notes.push_back(nf.note);
    if (nf.degenerate) ev.genericity = 0.0;
    finish_event(std::move(ev));
  }

  collapse_degenerate_clusters(out.events);
  warn_weak_events(out.events, out.warnings);
  std::sort(out.events.begin(), out.events.end(), [](const BifEvent& a, const BifEvent& b) {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.code != b.code) return static_cast<int>(a.code) < static_cast<int>(b.code);
    return a.p.x < b.p.x;
  });
  return out;
}

}  // namespace dae::scan
