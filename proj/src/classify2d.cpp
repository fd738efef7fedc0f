#include "dae/classify2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace dae::d2 {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

const char* code_name(BifCode code) {
  switch (code) {
    case BifCode::T1: return "T1";
    case BifCode::T2: return "T2";
    case BifCode::L1: return "L1";
    case BifCode::L2: return "L2";
    case BifCode::L3: return "L3";
    case BifCode::L4: return "L4";
    case BifCode::L5: return "L5";
    case BifCode::L6: return "L6";
    case BifCode::L7: return "L7";
    case BifCode::L8: return "L8";
    case BifCode::L9: return "L9";
    case BifCode::G6FoldFold: return "G6-fold-fold";
    case BifCode::A11: return "A1.1";
    case BifCode::A21: return "A2.1";
    case BifCode::A300: return "A3.0,0";
  }
  return "?";
}

const char* class_name(const Point2DClass& cls) {
  struct Visitor {
    const char* operator()(const RegularPoint2D&) const { return "regular-point"; }
    const char* operator()(const Equilibrium& e) const {
      switch (e.kind) {
        case EqKind::Saddle: return "saddle";
        case EqKind::Node: return "node";
        case EqKind::Focus: return "focus";
      }
      return "equilibrium";
    }
    const char* operator()(const SingularEquilibrium2D& e) const {
      switch (e.kind) {
        case SEqKind::FoldedSaddle: return "folded-saddle";
        case SEqKind::FoldedNode: return "folded-node";
        case SEqKind::FoldedFocus: return "folded-focus";
      }
      return "singular-equilibrium";
    }
    const char* operator()(const Fold&) const { return "fold"; }
    const char* operator()(const DegeneratePoint&) const { return "degenerate-point"; }
  };
  return std::visit(Visitor{}, cls);
}

Point2DClass classify_point_2d(const System2D& sys, Vec2 p, double alpha, const Tol& tol) {
  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 j2 = sys.f2.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  const bool z_f1 = std::abs(j1.v) <= tol.residual;
  const bool z_f2 = std::abs(j2.v) <= tol.residual;
  const bool z_g = std::abs(jg.v) <= tol.residual;

  if (z_f1 && z_g) {
    if (z_f2)
      return DegeneratePoint{BifCode::L3, "f1 = f2 = g = 0: equilibrium lies on the singular set"};
    if (std::abs(jg.x) <= tol.deriv)
      return DegeneratePoint{BifCode::L5, "g = g_x = f1 = 0: singular equilibrium meets a fold"};

    const Mat2 A{j1.x, j1.y, jg.x * j2.v, jg.y * j2.v};
    const double det = A.det(), tr = A.trace(), disc = A.disc();
    const double det_f1g = j1.x * jg.y - j1.y * jg.x;
    if (std::abs(det_f1g) <= tol.deriv)
      return DegeneratePoint{BifCode::L2, "det d(f1,g)/d(x,y) = 0 at a singular equilibrium"};
    if (std::abs(disc) <= tol.deriv)
      return DegeneratePoint{BifCode::L6, "coincident eigenvalues of the singular-equilibrium linearization"};
    if (disc < 0.0 && std::abs(tr) <= tol.deriv)
      return DegeneratePoint{BifCode::L8, "imaginary eigenvalue pair of the singular-equilibrium linearization"};

    SingularEquilibrium2D out;
    std::tie(out.lambda1, out.lambda2) = eigenvalues(A);
    out.kind = disc < 0.0 ? SEqKind::FoldedFocus
                          : (det < 0.0 ? SEqKind::FoldedSaddle : SEqKind::FoldedNode);
    out.simple = true;
    return out;
  }

  if (z_f1 && z_f2) {
    const Mat2 A{j1.x, j1.y, jg.v * j2.x, jg.v * j2.y};
    const double det = A.det(), tr = A.trace(), disc = A.disc();
    if (std::abs(det) <= tol.deriv)
      return DegeneratePoint{BifCode::L1, "zero eigenvalue of the equilibrium linearization"};
    if (disc < 0.0 && std::abs(tr) <= tol.deriv)
      return DegeneratePoint{BifCode::L7, "imaginary eigenvalue pair of the equilibrium linearization"};

    Equilibrium out;
    std::tie(out.lambda1, out.lambda2) = eigenvalues(A);
    out.kind = det < 0.0 ? EqKind::Saddle : (disc >= 0.0 ? EqKind::Node : EqKind::Focus);
    out.side = jg.v > 0.0 ? Side::SigmaPlus : Side::SigmaMinus;
    out.desing_stable = std::max(out.lambda1.real(), out.lambda2.real()) < 0.0;
    const bool desing_unstable = std::min(out.lambda1.real(), out.lambda2.real()) > 0.0;
    out.stable = out.side == Side::SigmaPlus ? out.desing_stable : desing_unstable;
    return out;
  }

  if (z_g && std::abs(jg.x) <= tol.deriv) {
    if (std::abs(jg.y) <= tol.deriv) {
      const double hdet = jg.xx * jg.yy - jg.xy * jg.xy;
      return DegeneratePoint{hdet < 0.0 ? BifCode::T1 : BifCode::T2,
                             "grad g = 0 on the singular set (critical point of g)"};
    }
    if (std::abs(jg.xx) <= tol.deriv)
      return DegeneratePoint{BifCode::L4, "g_xx = 0 at a fold (cubic tangency)"};
    Fold out;
    out.convexity = jg.xx * jg.y > 0.0 ? Side::SigmaPlus : Side::SigmaMinus;
    out.simple = true;
    return out;
  }

  return RegularPoint2D{};
}

FindResult2D find_points_2d(const System2D& sys, double alpha, const BBox& box, int grid_n,
                            const Tol& tol, Exec exec) {
  FindResult2D out;
  if (grid_n < 2) grid_n = 2;

  std::vector<std::array<double, 2>> seeds;
  seeds.reserve(static_cast<std::size_t>(grid_n) * grid_n);
  const double dx = (box.x1 - box.x0) / grid_n, dy = (box.y1 - box.y0) / grid_n;
  for (int j = 0; j < grid_n; ++j)
    for (int i = 0; i < grid_n; ++i)
      seeds.push_back({box.x0 + (i + 0.5) * dx, box.y0 + (j + 0.5) * dy});

  using Fn2 = std::function<std::array<double, 2>(const std::array<double, 2>&)>;
  using Jn2 = std::function<std::array<double, 4>(const std::array<double, 2>&)>;

  const Fn2 F[3] = {
      [&](const std::array<double, 2>& q) -> std::array<double, 2> {
        return {sys.f1.value(q[0], q[1], alpha), sys.f2.value(q[0], q[1], alpha)};
      },
      [&](const std::array<double, 2>& q) -> std::array<double, 2> {
        return {sys.f1.value(q[0], q[1], alpha), sys.g.value(q[0], q[1], alpha)};
      },
      [&](const std::array<double, 2>& q) -> std::array<double, 2> {
        const Jet3 jg = sys.g.jet_unchecked(q[0], q[1], alpha);
        return {jg.v, jg.x};
      },
  };
  const Jn2 J[3] = {
      [&](const std::array<double, 2>& q) -> std::array<double, 4> {
        const auto g1 = sys.f1.gradient(q[0], q[1], alpha);
        const auto g2 = sys.f2.gradient(q[0], q[1], alpha);
        return {g1[0], g1[1], g2[0], g2[1]};
      },
      [&](const std::array<double, 2>& q) -> std::array<double, 4> {
        const auto g1 = sys.f1.gradient(q[0], q[1], alpha);
        const auto gg = sys.g.gradient(q[0], q[1], alpha);
        return {g1[0], g1[1], gg[0], gg[1]};
      },
      [&](const std::array<double, 2>& q) -> std::array<double, 4> {
        const Jet3 jg = sys.g.jet_unchecked(q[0], q[1], alpha);
        return {jg.x, jg.y, jg.xx, jg.xy};
      },
  };

  NewtonOptions nopt;
  nopt.f_tol = tol.newton;
  const double slack = 1e-9 * std::max(1.0, box.diag());

  struct Root {
    Vec2 p;
    int system;
  };
  std::vector<Root> roots;
  for (int s = 0; s < 3; ++s) {
    const auto results = multistart_newton<2>(F[s], J[s], seeds, nopt, exec);
    // Deterministic post-pass in seed order.
    std::vector<Vec2> uniq;
    for (const auto& r : results) {
      if (!r.converged) continue;
      const Vec2 p{r.x[0], r.x[1]};
      if (!box.contains(p, slack)) continue;
      bool dup = false;
      for (const Vec2& q : uniq)
        if (norm(p - q) <= tol.residual) {
          dup = true;
          break;
        }
      if (!dup) uniq.push_back(p);
    }
    for (const Vec2& p : uniq) roots.push_back({p, s});
  }

  // Merge roots of different defining systems (a point satisfying two of
  // them is a single degenerate object); cluster with union-find.
  const double merge_r = tol.merge_radius();
  std::vector<int> parent(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find_rep = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (roots[i].system != roots[j].system && norm(roots[i].p - roots[j].p) <= merge_r)
        parent[find_rep(static_cast<int>(j))] = find_rep(static_cast<int>(i));

  struct Cluster {
    Vec2 sum{};
    int count = 0;
    double spread = 0.0;
  };
  std::vector<std::pair<int, Cluster>> clusters;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const int rep = find_rep(static_cast<int>(i));
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const auto& c) { return c.first == rep; });
    if (it == clusters.end()) {
      clusters.push_back({rep, Cluster{}});
      it = clusters.end() - 1;
    }
    it->second.sum = it->second.sum + roots[i].p;
    it->second.count += 1;
  }
  for (auto& [rep, c] : clusters) {
    const Vec2 mean = (1.0 / c.count) * c.sum;
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (find_rep(static_cast<int>(i)) == rep)
        c.spread = std::max(c.spread, norm(roots[i].p - mean));
  }

  for (const auto& [rep, c] : clusters) {
    const Vec2 p = (1.0 / c.count) * c.sum;
    // Widen the zero threshold to cover the cluster diameter so a merged
    // pair is classified as the degenerate object it represents.
    Tol ct = tol;
    ct.residual = std::max(tol.residual, 4.0 * c.spread);
    out.points.push_back({p, classify_point_2d(sys, p, alpha, ct)});
  }
  std::sort(out.points.begin(), out.points.end(), [](const SpecialPoint2D& a, const SpecialPoint2D& b) {
    return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
  });

  for (std::size_t i = 0; i < out.points.size(); ++i)
    for (std::size_t j = i + 1; j < out.points.size(); ++j)
      if (norm(out.points[i].p - out.points[j].p) <= merge_r)
        out.warnings.push_back("root cluster: points (" + fmt(out.points[i].p.x) + ", " +
                               fmt(out.points[i].p.y) + ") and (" + fmt(out.points[j].p.x) + ", " +
                               fmt(out.points[j].p.y) + ") are closer than the merge radius");
  return out;
}

// ---------------------------------------------------------------------------
// Sigma tracing

namespace {

constexpr double kSigmaResidual = 1e-10;

// Newton correction toward {g = 0} along grad g.
bool correct_to_sigma(const System2D& sys, double alpha, Vec2& p) {
  for (int it = 0; it < 20; ++it) {
    const double gv = sys.g.value(p.x, p.y, alpha);
    if (!std::isfinite(gv)) return false;
    if (std::abs(gv) <= kSigmaResidual) return true;
    const auto gr = sys.g.gradient(p.x, p.y, alpha);
    const double n2 = gr[0] * gr[0] + gr[1] * gr[1];
    if (!(n2 > 1e-24)) return false;
    p = p - (gv / n2) * Vec2{gr[0], gr[1]};
  }
  return std::abs(sys.g.value(p.x, p.y, alpha)) <= kSigmaResidual;
}

Vec2 sigma_tangent(const System2D& sys, double alpha, Vec2 p) {
  const auto gr = sys.g.gradient(p.x, p.y, alpha);
  return normalized(Vec2{gr[1], -gr[0]});
}

struct TraceResult {
  std::vector<Vec2> pts;
  bool closed = false;
  bool truncated = false;
  bool stalled = false;
};

TraceResult trace_from(const System2D& sys, double alpha, Vec2 start, double dir,
                       const BBox& box, double arc_step) {
  TraceResult tr;
  tr.pts.push_back(start);
  Vec2 p = start;
  Vec2 tan = dir * sigma_tangent(sys, alpha, start);
  if (norm(tan) == 0.0) {
    tr.stalled = true;
    return tr;
  }
  double h = arc_step;
  const double h_min = 1e-4 * arc_step;
  const int max_vertices = 200000;

  while (static_cast<int>(tr.pts.size()) < max_vertices) {
    Vec2 q = p + h * tan;
    if (!correct_to_sigma(sys, alpha, q)) {
      if (h > h_min) {
        h *= 0.5;
        continue;
      }
      tr.truncated = true;  // gradient degenerated: cannot continue
      return tr;
    }
    Vec2 new_tan = sigma_tangent(sys, alpha, q);
    if (dot(new_tan, tan) < 0.0) new_tan = -1.0 * new_tan;
    // Curvature control: sharp turns force smaller steps.
    const double turn = std::acos(std::clamp(dot(new_tan, tan), -1.0, 1.0));
    if (turn > 0.35 && h > h_min) {
      h *= 0.5;
      continue;
    }

    if (!box.contains(q)) {
      // Walk the remaining arc down to the boundary.
      double lo = 0.0, hi = h;
      Vec2 inside = p;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        Vec2 m = p + mid * tan;
        if (!correct_to_sigma(sys, alpha, m)) break;
        if (box.contains(m)) {
          lo = mid;
          inside = m;
        } else {
          hi = mid;
        }
      }
      if (norm(inside - p) > 1e-12) tr.pts.push_back(inside);
      return tr;
    }

    tr.pts.push_back(q);
    // Closure test against the trace origin.
    if (tr.pts.size() > 8 && norm(q - start) < 0.75 * h && dot(new_tan, dir * sigma_tangent(sys, alpha, start)) > 0.8) {
      tr.closed = true;
      tr.pts.push_back(start);
      return tr;
    }
    p = q;
    tan = new_tan;
    if (turn < 0.1) h = std::min(arc_step, 1.6 * h);
  }
  tr.truncated = true;
  return tr;
}

// Root of `fn` along the Sigma arc between two nearby on-curve points.
Vec2 bisect_on_sigma(const System2D& sys, double alpha, Vec2 a, Vec2 b,
                     const std::function<double(Vec2)>& fn) {
  double va = fn(a);
  for (int it = 0; it < 80; ++it) {
    Vec2 m = 0.5 * (a + b);
    if (!correct_to_sigma(sys, alpha, m)) break;
    const double vm = fn(m);
    if (vm == 0.0 || norm(b - a) < 1e-14) return m;
    if ((vm < 0.0) == (va < 0.0)) {
      a = m;
      va = vm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

SigmaCurve trace_sigma(const System2D& sys, double alpha, const BBox& box, double arc_step,
                       const Tol& tol) {
  SigmaCurve out;
  if (arc_step <= 0.0) arc_step = 0.01 * box.diag();

  // Seed scan: grid sign changes of g along both edge directions.
  const int n = std::clamp(static_cast<int>(std::ceil(2.0 * box.diag() / arc_step)), 64, 512);
  const auto values = grid_eval(
      [&](double x, double y) { return sys.g.value(x, y, alpha); }, box, n + 1, n + 1);
  const double gdx = (box.x1 - box.x0) / n, gdy = (box.y1 - box.y0) / n;

  std::vector<Vec2> seed_pts;
  auto add_seed = [&](Vec2 a, Vec2 b, double va, double) {
    // Bisect g along the straight grid edge.
    for (int it = 0; it < 60; ++it) {
      const Vec2 m = 0.5 * (a + b);
      const double vm = sys.g.value(m.x, m.y, alpha);
      if ((vm < 0.0) == (va < 0.0)) {
        a = m;
        va = vm;
      } else {
        b = m;
      }
    }
    seed_pts.push_back(0.5 * (a + b));
  };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double v = values[j * (n + 1) + i];
      const Vec2 p{box.x0 + i * gdx, box.y0 + j * gdy};
      if (i < n) {
        const double vr = values[j * (n + 1) + i + 1];
        if ((v < 0.0) != (vr < 0.0)) add_seed(p, {p.x + gdx, p.y}, v, vr);
      }
      if (j < n) {
        const double vu = values[(j + 1) * (n + 1) + i];
        if ((v < 0.0) != (vu < 0.0)) add_seed(p, {p.x, p.y + gdy}, v, vu);
      }
    }

  // Spatial hash marks cells already swept by a traced branch.
  const double cell = std::max(arc_step, 1e-12);
  std::vector<std::pair<long, long>> visited;
  auto cell_of = [&](Vec2 p) -> std::pair<long, long> {
    return {static_cast<long>(std::floor(p.x / cell)), static_cast<long>(std::floor(p.y / cell))};
  };
  auto is_visited = [&](Vec2 p) {
    const auto c = cell_of(p);
    for (const auto& v : visited)
      if (std::abs(v.first - c.first) <= 1 && std::abs(v.second - c.second) <= 1) return true;
    return false;
  };

  for (Vec2 seed : seed_pts) {
    if (!correct_to_sigma(sys, alpha, seed)) continue;
    if (!box.contains(seed) || is_visited(seed)) continue;

    TraceResult fwd = trace_from(sys, alpha, seed, +1.0, box, arc_step);
    SigmaBranch branch;
    branch.closed = fwd.closed;
    branch.truncated = fwd.truncated;
    std::vector<Vec2> poly;
    if (fwd.closed) {
      poly = fwd.pts;
    } else {
      TraceResult bwd = trace_from(sys, alpha, seed, -1.0, box, arc_step);
      branch.truncated = branch.truncated || bwd.truncated;
      poly.assign(bwd.pts.rbegin(), bwd.pts.rend());
      poly.insert(poly.end(), fwd.pts.begin() + 1, fwd.pts.end());
    }
    if (poly.size() < 2) continue;
    if (branch.truncated)
      out.warnings.push_back("sigma branch truncated near (" + fmt(poly.back().x) + ", " +
                             fmt(poly.back().y) + "): grad g degenerates");

    for (Vec2 p : poly) visited.push_back(cell_of(p));

    // Localize fold (g_x = 0) and singular-equilibrium (f1 = 0) vertices,
    // then label arcs by the sign of f1 * g_x.
    auto f1_at = [&](Vec2 p) { return sys.f1.value(p.x, p.y, alpha); };
    auto gx_at = [&](Vec2 p) { return sys.g.gradient(p.x, p.y, alpha)[0]; };

    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 p = poly[i];
      branch.pts.push_back({p, ArcLabel::None});
      if (i + 1 >= poly.size()) break;
      const Vec2 q = poly[i + 1];
      struct Cross {
        double dist;
        Vec2 at;
        SigmaMarkKind kind;
      };
      std::vector<Cross> crossings;
      if ((f1_at(p) < 0.0) != (f1_at(q) < 0.0)) {
        const Vec2 m = bisect_on_sigma(sys, alpha, p, q, f1_at);
        crossings.push_back({norm(m - p), m, SigmaMarkKind::SingularEquilibrium});
      }
      if ((gx_at(p) < 0.0) != (gx_at(q) < 0.0)) {
        const Vec2 m = bisect_on_sigma(sys, alpha, p, q, gx_at);
        crossings.push_back({norm(m - p), m, SigmaMarkKind::Fold});
      }
      std::sort(crossings.begin(), crossings.end(),
                [](const Cross& a, const Cross& b) { return a.dist < b.dist; });
      for (const Cross& c : crossings) {
        branch.marks.push_back({static_cast<int>(branch.pts.size()), c.kind});
        branch.pts.push_back({c.at, ArcLabel::None});
      }
    }

    for (SigmaVertex& v : branch.pts) {
      const double f1v = f1_at(v.p), gxv = gx_at(v.p);
      const double w = f1v * gxv;
      const double scale = std::max({1.0, std::abs(f1v), std::abs(gxv)});
      v.label = std::abs(w) <= tol.deriv * scale ? ArcLabel::None
                : (w > 0.0 ? ArcLabel::Outgoing : ArcLabel::Incoming);
    }
    for (const SigmaMark& m : branch.marks) branch.pts[m.vertex].label = ArcLabel::None;
    out.branches.push_back(std::move(branch));
  }

  std::sort(out.branches.begin(), out.branches.end(), [](const SigmaBranch& a, const SigmaBranch& b) {
    const Vec2 pa = a.pts.front().p, pb = b.pts.front().p;
    return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sector decomposition

const char* sector_label_name(SectorLabel label) {
  switch (label) {
    case SectorLabel::Incoming: return "incoming";
    case SectorLabel::Stable: return "stable";
    case SectorLabel::Outgoing: return "outgoing";
    case SectorLabel::Unstable: return "unstable";
    case SectorLabel::Saddle: return "saddle";
  }
  return "?";
}

SectorDecomposition sector_decomposition(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol) {
  const Point2DClass cls = classify_point_2d(sys, p, alpha, tol);
  const auto* seq = std::get_if<SingularEquilibrium2D>(&cls);
  if (!seq)
    throw std::invalid_argument(
        "sector_decomposition: point is not a simple singular equilibrium (got " +
        std::string(class_name(cls)) + ")");

  const Jet3 j1 = sys.f1.jet(p.x, p.y, alpha);
  const Jet3 j2 = sys.f2.jet(p.x, p.y, alpha);
  const Jet3 jg = sys.g.jet(p.x, p.y, alpha);
  const Mat2 A{j1.x, j1.y, jg.x * j2.v, jg.y * j2.v};

  SectorDecomposition out;
  out.center = p;
  out.lambda1 = seq->lambda1;
  out.lambda2 = seq->lambda2;

  const Vec2 sig_tan = normalized(Vec2{jg.y, -jg.x});
  const Vec2 grad_g{jg.x, jg.y};

  if (seq->kind == SEqKind::FoldedFocus) {
    out.has_sectors = false;
    out.note = "folded focus: no invariant sectors; every nearby orbit reaches the singular set";
    return out;
  }

  const double l1 = out.lambda1.real(), l2 = out.lambda2.real();
  const Vec2 v1 = eigenvector(A, l1), v2 = eigenvector(A, l2);
  out.transversality_margin = std::min(std::abs(cross(v1, sig_tan)), std::abs(cross(v2, sig_tan)));
  if (out.transversality_margin < tol.deriv)
    out.note = "eigendirection nearly tangent to the singular set: sector geometry unreliable";
  out.has_sectors = true;

  struct Ray {
    double angle;
    SectorRay ray;
  };
  std::vector<Ray> rays;
  auto push_ray = [&](Vec2 d, SectorRay::Kind kind) {
    rays.push_back({std::atan2(d.y, d.x), SectorRay{d, kind}});
  };

  auto angle_in = [](double a, double from, double to) {
    const double tau = 2.0 * std::numbers::pi;
    double span = to - from;
    if (span <= 0.0) span += tau;
    double off = a - from;
    while (off < 0.0) off += tau;
    while (off >= tau) off -= tau;
    return off < span;
  };

  if (seq->kind == SEqKind::FoldedNode) {
    // Leading direction: eigenvalue of smaller magnitude.
    const bool first_leading = std::abs(l1) < std::abs(l2);
    const Vec2 lead = first_leading ? v1 : v2;
    const Vec2 nonlead = first_leading ? v2 : v1;
    push_ray(nonlead, SectorRay::Kind::EigenNonLeading);
    push_ray(-1.0 * nonlead, SectorRay::Kind::EigenNonLeading);
    push_ray(sig_tan, SectorRay::Kind::SigmaTangent);
    push_ray(-1.0 * sig_tan, SectorRay::Kind::SigmaTangent);
    std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.angle < b.angle; });

    const bool contracting_on_plus = l1 < 0.0;  // desing flow contracts; same time arrow on Sigma+
    const double lead_angle = std::atan2(lead.y, lead.x);
    for (std::size_t k = 0; k < rays.size(); ++k) {
      const Ray& r0 = rays[k];
      const Ray& r1 = rays[(k + 1) % rays.size()];
      Sector sec;
      sec.from = r0.ray;
      sec.to = r1.ray;
      double span = r1.angle - r0.angle;
      if (span <= 0.0) span += 2.0 * std::numbers::pi;
      const double mid = r0.angle + 0.5 * span;
      const Vec2 d{std::cos(mid), std::sin(mid)};
      const bool on_plus = dot(grad_g, d) > 0.0;
      const bool contains_lead = angle_in(lead_angle, r0.angle, r1.angle) ||
                                 angle_in(lead_angle + std::numbers::pi, r0.angle, r1.angle);
      const bool contracting_side = on_plus == contracting_on_plus;
      sec.label = contracting_side ? (contains_lead ? SectorLabel::Stable : SectorLabel::Incoming)
                                   : (contains_lead ? SectorLabel::Unstable : SectorLabel::Outgoing);
      out.sectors.push_back(sec);
    }
    return out;
  }

  // Folded saddle: boundaries are both eigenlines and the Sigma tangent.
  const Vec2 v_stable = l1 < 0.0 ? v1 : v2;
  const Vec2 v_unstable = l1 < 0.0 ? v2 : v1;
  push_ray(v_stable, SectorRay::Kind::EigenStable);
  push_ray(-1.0 * v_stable, SectorRay::Kind::EigenStable);
  push_ray(v_unstable, SectorRay::Kind::EigenUnstable);
  push_ray(-1.0 * v_unstable, SectorRay::Kind::EigenUnstable);
  push_ray(sig_tan, SectorRay::Kind::SigmaTangent);
  push_ray(-1.0 * sig_tan, SectorRay::Kind::SigmaTangent);
  std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.angle < b.angle; });

  for (std::size_t k = 0; k < rays.size(); ++k) {
    const Ray& r0 = rays[k];
    const Ray& r1 = rays[(k + 1) % rays.size()];
    Sector sec;
    sec.from = r0.ray;
    sec.to = r1.ray;
    const bool b0_sigma = r0.ray.kind == SectorRay::Kind::SigmaTangent;
    const bool b1_sigma = r1.ray.kind == SectorRay::Kind::SigmaTangent;
    if (!b0_sigma && !b1_sigma) {
      sec.label = SectorLabel::Saddle;
    } else {
      double span = r1.angle - r0.angle;
      if (span <= 0.0) span += 2.0 * std::numbers::pi;
      const double mid = r0.angle + 0.5 * span;
      const Vec2 d{std::cos(mid), std::sin(mid)};
      const bool on_plus = dot(grad_g, d) > 0.0;
      const SectorRay::Kind eig_kind = b0_sigma ? r1.ray.kind : r0.ray.kind;
      // A sector walled by the stable eigenline is swept across its Sigma
      // boundary in forward desingularized time (orbits leave along the
      // unstable line), so it reaches Sigma in forward original time on
      // Sigma+ and in backward original time on Sigma-.
      const bool crossed_forward = eig_kind == SectorRay::Kind::EigenStable;
      sec.label = (crossed_forward == on_plus) ? SectorLabel::Incoming : SectorLabel::Outgoing;
    }
    out.sectors.push_back(sec);
  }
  return out;
}

}  // namespace dae::d2
