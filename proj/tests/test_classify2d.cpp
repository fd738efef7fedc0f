// Planar classification: equilibria on both sides of the singular curve,
// folded singular equilibria, fold convexity, curve tracing with arc labels,
// and sector decompositions checked by integrating the rescaled field.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dae/classify2d.hpp"
#include "dae/desing.hpp"
#include "dae/expr.hpp"
#include "dae/system.hpp"

using namespace dae;
using namespace dae::d2;

namespace {

System2D sys2(const char* f1, const char* f2, const char* g) {
  return System2D(make_system_2d(parse_expression(f1), parse_expression(f2),
                                 parse_expression(g)));
}

// Return by value: call sites pass freshly classified temporaries.
Equilibrium as_eq(const Point2DClass& c) {
  const auto* e = std::get_if<Equilibrium>(&c);
  REQUIRE(e != nullptr);
  return *e;
}

SingularEquilibrium2D as_seq(const Point2DClass& c) {
  const auto* e = std::get_if<SingularEquilibrium2D>(&c);
  REQUIRE(e != nullptr);
  return *e;
}

}  // namespace

TEST_CASE("equilibrium linearization uses the rescaled field") {
  // f1 = -x + y, f2 = -y, g = 2 at origin: A_EQ = [[-1, 1], [0, -2]].
  const auto c = classify_point_2d(sys2("-x + y", "-y", "2"), {0, 0}, 0.0);
  const auto& eq = as_eq(c);
  CHECK(eq.kind == EqKind::Node);
  CHECK(eq.side == Side::SigmaPlus);
  CHECK(eq.desing_stable);
  CHECK(eq.stable);
  CHECK(eq.lambda1.real() == doctest::Approx(-2.0));
  CHECK(eq.lambda2.real() == doctest::Approx(-1.0));
}

TEST_CASE("stability is side-aware on the negative side of the curve") {
  // Same local phase portrait but g = -1 < 0: the rescaled flow runs
  // backward there, so a desing-unstable focus attracts in the original.
  const auto c = classify_point_2d(sys2("x + y", "x - y", "-1"), {0, 0}, 0.0);
  const auto& eq = as_eq(c);
  CHECK(eq.side == Side::SigmaMinus);
  CHECK(eq.kind == EqKind::Focus);
  CHECK(!eq.desing_stable);
  CHECK(eq.stable);
}

TEST_CASE("saddles are never attracting on either side") {
  const auto plus = as_eq(classify_point_2d(sys2("x", "-y", "1"), {0, 0}, 0.0));
  CHECK(plus.kind == EqKind::Saddle);
  CHECK(!plus.stable);
  // g = -1 flips time, but a saddle stays a saddle: A_EQ = [[1, 0], [0, -1]].
  const auto minus = as_eq(classify_point_2d(sys2("x", "y", "-1"), {0, 0}, 0.0));
  CHECK(minus.kind == EqKind::Saddle);
  CHECK(!minus.stable);
}

TEST_CASE("singular equilibria classify by the curve-adapted linearization") {
  // A_sEQ = [[f1x, f1y], [gx*f2, gy*f2]] at each origin below.
  {
    // [[-1, 1], [1, 1]]: det = -2 < 0 -> folded saddle.
    const auto& se = as_seq(classify_point_2d(sys2("y - x", "1", "x + y"), {0, 0}, 0.0));
    CHECK(se.kind == SEqKind::FoldedSaddle);
    CHECK(se.simple);
  }
  {
    // [[0, 1], [-1, 1]]: det = 1, tr = 1, disc = -3 -> folded focus.
    const auto& se = as_seq(classify_point_2d(sys2("y", "1", "y - x"), {0, 0}, 0.0));
    CHECK(se.kind == SEqKind::FoldedFocus);
  }
  {
    // [[-3, 1], [-0.5, -1]]: det = 3.5, tr = -4, disc = 2 -> folded node.
    const auto& se = as_seq(classify_point_2d(sys2("-3*x + y", "-1", "y + 0.5*x"), {0, 0}, 0.0));
    CHECK(se.kind == SEqKind::FoldedNode);
    CHECK(se.simple);
  }
}

TEST_CASE("fold convexity points toward the side the arc bulges into") {
  // g = y - x^2: the parabola bulges toward negative y, where g < 0; and
  // indeed g_xx * g_y = -2 picks SigmaMinus.
  {
    const auto c = classify_point_2d(sys2("1", "1", "y - x^2"), {0, 0}, 0.0);
    const auto* fold = std::get_if<Fold>(&c);
    REQUIRE(fold);
    CHECK(fold->convexity == Side::SigmaMinus);
    CHECK(fold->simple);
  }
  {
    const auto c = classify_point_2d(sys2("1", "1", "y + x^2"), {0, 0}, 0.0);
    const auto* fold = std::get_if<Fold>(&c);
    REQUIRE(fold);
    CHECK(fold->convexity == Side::SigmaPlus);
  }
}

TEST_CASE("degenerate candidates are reported, not misclassified") {
  // Equilibrium with det A_EQ = 0: f1 = x, f2 = x, g = 1.
  {
    const auto c = classify_point_2d(sys2("x", "x", "1"), {0, 0}, 0.0);
    const auto* d = std::get_if<DegeneratePoint>(&c);
    REQUIRE(d);
    CHECK(d->candidate == BifCode::L1);
  }
  // Fold with g_xx = 0 (cubic inflection): candidate L4.
  {
    const auto c = classify_point_2d(sys2("1", "1", "y - x^3"), {0, 0}, 0.0);
    const auto* d = std::get_if<DegeneratePoint>(&c);
    REQUIRE(d);
    CHECK(d->candidate == BifCode::L4);
  }
  // Full triple point f1 = f2 = g = 0: candidate L3.
  {
    const auto c = classify_point_2d(sys2("x", "y", "x + y"), {0, 0}, 0.0);
    const auto* d = std::get_if<DegeneratePoint>(&c);
    REQUIRE(d);
    CHECK(d->candidate == BifCode::L3);
  }
}

TEST_CASE("find_points_2d locates and classifies every special point") {
  // Cubic singular curve with one equilibrium and folded points:
  // f1 = y - x + 0.01, f2 = y, g = x - x^3.
  const auto sys = sys2("y - x + 0.01", "y", "x - x^3");
  const auto res = find_points_2d(sys, 0.0, BBox{-2, -2, 2, 2});
  // Equilibrium at y = 0, x = 0.01 (f1 = 0 -> x = y + 0.01).
  bool found_eq = false, found_seq = false;
  for (const auto& sp : res.points) {
    if (std::holds_alternative<Equilibrium>(sp.cls)) {
      found_eq = true;
      CHECK(sp.p.x == doctest::Approx(0.01).epsilon(1e-8));
      CHECK(sp.p.y == doctest::Approx(0.0).epsilon(1e-8));
    }
    if (std::holds_alternative<SingularEquilibrium2D>(sp.cls)) found_seq = true;
  }
  CHECK(found_eq);
  CHECK(found_seq);  // f1 = 0 meets each vertical line x in {0, +-1}
  CHECK(res.warnings.empty());
}

TEST_CASE("equilibrium near the singular curve keeps its rescaled character") {
  // Equilibrium at (0.01, 0) with g = x - x^3 ~ 0.01 > 0 there:
  // A_EQ = [[-1, 1], [0, g]] has eigenvalues -1 and g -> saddle, unstable.
  const auto sys = sys2("y - x + 0.01", "y", "x - x^3");
  const auto& eq = as_eq(classify_point_2d(sys, {0.01, 0.0}, 0.0));
  CHECK(eq.side == Side::SigmaPlus);
  CHECK(eq.kind == EqKind::Saddle);
  CHECK(!eq.stable);
}

TEST_CASE("trace_sigma produces one branch per component with fold marks") {
  // g = x - x^3: three vertical lines, no folds (g_x = 1 - 3x^2 != 0 there).
  {
    const auto curve = trace_sigma(sys2("y - x", "y", "x - x^3"), 0.0, BBox{-2, -2, 2, 2});
    CHECK(curve.branches.size() == 3);
    for (const auto& b : curve.branches) {
      CHECK(!b.closed);
      CHECK(b.pts.size() >= 2);
      for (const auto& m : b.marks) CHECK(m.kind == SigmaMarkKind::SingularEquilibrium);
    }
  }
  // Circle g = x^2 + y^2 - 1: one closed branch, two folds (g_x = 0 at
  // (0, +-1)).
  {
    const auto curve = trace_sigma(sys2("1", "1", "x^2 + y^2 - 1"), 0.0, BBox{-2, -2, 2, 2});
    REQUIRE(curve.branches.size() == 1);
    const auto& b = curve.branches[0];
    CHECK(b.closed);
    int folds = 0;
    for (const auto& m : b.marks)
      if (m.kind == SigmaMarkKind::Fold) ++folds;
    CHECK(folds == 2);
    // Every vertex lies on the curve.
    const auto s = sys2("1", "1", "x^2 + y^2 - 1");
    for (const auto& v : b.pts)
      CHECK(std::abs(v.p.x * v.p.x + v.p.y * v.p.y - 1.0) <= 1e-8);
  }
  // Empty curve: g > 0 everywhere in the box.
  {
    const auto curve = trace_sigma(sys2("1", "1", "x^2 + y^2 + 1"), 0.0, BBox{-2, -2, 2, 2});
    CHECK(curve.branches.empty());
  }
}

TEST_CASE("arc labels flip only at marked vertices and match the sign rule") {
  // g = x, f1 = y: the line x = 0 carries a singular equilibrium at y = 0
  // (f1 = 0); label = sign(f1 * g_x) = sign(y).
  const auto curve = trace_sigma(sys2("y", "1", "x"), 0.0, BBox{-2, -2, 2, 2});
  REQUIRE(curve.branches.size() == 1);
  const auto& b = curve.branches[0];
  REQUIRE(!b.marks.empty());
  for (const auto& v : b.pts) {
    if (std::abs(v.p.y) < 1e-9) continue;  // the marked vertex itself
    if (v.p.y > 0)
      CHECK(v.label == ArcLabel::Outgoing);
    else
      CHECK(v.label == ArcLabel::Incoming);
  }
}

TEST_CASE("sector decomposition splits the neighborhood of a folded saddle") {
  // f1 = y - x, f2 = 1, g = x + y: folded saddle (above); the singular line
  // y = -x and the eigendirections of A_sEQ split the plane.
  const auto sys = sys2("y - x", "1", "x + y");
  const auto sd = sector_decomposition(sys, {0, 0}, 0.0);
  REQUIRE(sd.has_sectors);
  CHECK(sd.sectors.size() >= 4);
  CHECK(sd.transversality_margin > 0.0);
  int saddles = 0;
  for (const auto& s : sd.sectors)
    if (s.label == SectorLabel::Saddle) ++saddles;
  CHECK(saddles >= 1);
}

TEST_CASE("folded focus has no sector decomposition") {
  const auto sd = sector_decomposition(sys2("y", "1", "y - x"), {0, 0}, 0.0);
  CHECK(!sd.has_sectors);
  CHECK(!sd.note.empty());
}

TEST_CASE("sector decomposition rejects points that are not folded") {
  CHECK_THROWS_AS(sector_decomposition(sys2("x", "y", "1"), {0, 0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("sector labels agree with short integrations of the rescaled field") {
  // Folded node example from above: f1 = -3x + y, f2 = -1, g = y + 0.5x.
  const auto def = make_system_2d(parse_expression("-3*x + y"), parse_expression("-1"),
                                  parse_expression("y + 0.5*x"));
  const System2D sys(def);
  const auto sd = sector_decomposition(sys, {0, 0}, 0.0);
  REQUIRE(sd.has_sectors);

  const DesingField field = build_desingularized(sys);
  const BBox box{-1, -1, 1, 1};
  for (const auto& s : sd.sectors) {
    // Probe along the bisector of the sector, close to the center.
    Vec2 a = s.from.dir, b = s.to.dir;
    double am = std::atan2(a.y, a.x), bm = std::atan2(b.y, b.x);
    if (bm <= am) bm += 2 * 3.14159265358979323846;
    const double mid = 0.5 * (am + bm);
    const Vec2 p0{0.03 * std::cos(mid), 0.03 * std::sin(mid)};
    // Incoming/stable sectors: the forward rescaled orbit reaches Sigma or
    // the center; outgoing/unstable: the backward orbit does.
    const double dir = (s.label == SectorLabel::Outgoing || s.label == SectorLabel::Unstable)
                           ? -1.0
                           : 1.0;
    const auto orbit = integrate_desing(field, 0.0, p0, dir * 30.0, box);
    if (s.label == SectorLabel::Saddle) continue;  // generic probes leave sideways
    const bool reached_sigma = !orbit.crossings.empty();
    const Vec2 last = orbit.orbit.steps.empty()
                          ? p0
                          : Vec2{orbit.orbit.steps.back().y1[0], orbit.orbit.steps.back().y1[1]};
    const double r_last = std::hypot(last.x, last.y);
    CHECK((reached_sigma || r_last < 0.03 || orbit.left_box));
  }
}
