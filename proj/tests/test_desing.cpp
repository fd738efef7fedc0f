// Companion-flow machinery: field correspondence, singular-set crossing
// detection, orbit splitting/orientation, and limit-cycle location with the
// Floquet multiplier checked against a closed-form radial system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dae/desing.hpp"
#include "dae/expr.hpp"
#include "dae/system.hpp"

using namespace dae;
using namespace dae::d2;

namespace {

constexpr double kPi = 3.14159265358979323846;

DesingField field_of(const char* f1, const char* f2, const char* g) {
  return build_desingularized(System2D(
      make_system_2d(parse_expression(f1), parse_expression(f2), parse_expression(g))));
}

// Hand-built radial system: unit circle is an attracting cycle of
// (x', y') = (-y + x(1 - r^2), x + y(1 - r^2)); divergence on the cycle is
// -4 + 2 = ... computed below; the singular-set function is x - c.
DesingField radial_field(double c) {
  const Expr x = Expr::variable(Var::X), y = Expr::variable(Var::Y);
  const Expr r2 = x * x + y * y;
  const Expr one = Expr::constant(1.0);
  DesingField f;
  f.fx = JetExpr(Expr::constant(0.0) - y + x * (one - r2));
  f.fy = JetExpr(x + y * (one - r2));
  f.g = JetExpr(x - Expr::constant(c));
  return f;
}

}  // namespace

TEST_CASE("companion field equals (f1, f2*g) with symbolic derivatives") {
  const auto f = field_of("y - x", "x + 1", "y - x^2");
  const Vec2 p{0.7, -0.4};
  const Vec2 v = f.eval(p, 0.0);
  const double g = -0.4 - 0.49;
  CHECK(v.x == doctest::Approx(-0.4 - 0.7));
  CHECK(v.y == doctest::Approx((0.7 + 1) * g));

  // divergence = d(f1)/dx + d(f2*g)/dy = -1 + (x + 1) * 1 = x.
  CHECK(f.divergence(p, 0.0) == doctest::Approx(-1.0 + (0.7 + 1.0) * 1.0));
}

TEST_CASE("crossings of the singular set are localized with direction") {
  // Straight-line motion through g = x: f1 = 1, f2 = 0*... companion field
  // (1, 0) from (-1, 0.5) crosses x = 0 at t = 1 with g increasing.
  const auto f = field_of("1", "1", "x");
  const auto orb = integrate_desing(f, 0.0, {-1.0, 0.5}, 3.0, BBox{-5, -5, 5, 5});
  REQUIRE(orb.crossings.size() == 1);
  CHECK(orb.crossings[0].t == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(orb.crossings[0].p.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(orb.crossings[0].direction == 1);
  CHECK(!orb.crossings[0].tangential);

  // Reverse: starting right, moving right-to-left in backward time.
  const auto back = integrate_desing(f, 0.0, {-1.0, 0.5}, -3.0, BBox{-5, -5, 5, 5});
  CHECK(back.crossings.empty());  // moves away from the singular set
}

TEST_CASE("a tangential touch of the singular set is flagged") {
  // Companion orbit of (1, 2t): with f1 = 1, f2 = 2x... simpler: parabola
  // orbit y = x^2 under field (1, 2x), touching g = y at the origin.
  const Expr x = Expr::variable(Var::X);
  DesingField f;
  f.fx = JetExpr(Expr::constant(1.0));
  f.fy = JetExpr(Expr::constant(2.0) * x);
  f.g = JetExpr(Expr::variable(Var::Y));
  const auto orb = integrate_desing(f, 0.0, {-1.0, 1.0}, 2.0, BBox{-5, -5, 5, 5});
  REQUIRE(!orb.crossings.empty());
  CHECK(orb.crossings[0].tangential);
  CHECK(orb.crossings[0].p.x == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("box exit stops the integration and is reported") {
  const auto f = field_of("1", "1", "1");  // companion field (1, 1)
  const auto orb = integrate_desing(f, 0.0, {0.0, 0.0}, 100.0, BBox{-1, -1, 1, 1});
  CHECK(orb.left_box);
  REQUIRE(!orb.orbit.steps.empty());
  const auto& last = orb.orbit.steps.back();
  CHECK(last.y1[0] <= 1.0 + 1e-6);
  CHECK(last.y1[1] <= 1.0 + 1e-6);
}

TEST_CASE("orbit splitting reverses pieces on the negative side") {
  // f1 = -1, g = x: the line x = 0 is an incoming arc (f1 * g_x < 0), so in
  // original time both adjacent orbit pieces arrive at it in finite time.
  // The companion field (-1, 0) just slides left through the whole strip.
  const auto f = field_of("-1", "0", "x");
  const auto orb = integrate_desing(f, 0.0, {1.0, 0.0}, 2.0, BBox{-5, -5, 5, 5});
  const auto pieces = split_to_dae_orbits(f, 0.0, orb);
  REQUIRE(pieces.size() == 2);

  const auto& pos = pieces[0].side == 1 ? pieces[0] : pieces[1];
  const auto& neg = pieces[0].side == 1 ? pieces[1] : pieces[0];
  REQUIRE(pos.side == 1);
  REQUIRE(neg.side == -1);

  // Positive-side piece keeps the companion order: from (1, 0) to the arc.
  CHECK(pos.ends_on_sigma);
  CHECK(!pos.starts_on_sigma);
  REQUIRE(pos.pts.size() >= 2);
  CHECK(pos.pts.front().x == doctest::Approx(1.0));
  CHECK(pos.pts.back().x == doctest::Approx(0.0).epsilon(1e-6));

  // Negative-side piece is re-oriented: original motion runs right, toward
  // the arc, opposite to the companion traversal.
  CHECK(neg.ends_on_sigma);
  CHECK(!neg.starts_on_sigma);
  REQUIRE(neg.pts.size() >= 2);
  CHECK(neg.pts.front().x < neg.pts.back().x);
  CHECK(neg.pts.back().x == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("limit cycle of the radial system: period and multiplier") {
  // Singular set far away (c = 5): regular cycle on the unit circle.
  const auto f = radial_field(5.0);
  const auto lc = find_limit_cycle(f, 0.0, {0.3, 0.2}, BBox{-3, -3, 3, 3});
  REQUIRE(lc.found);
  CHECK(!lc.folded);
  CHECK(lc.sigma_crossings == 0);
  CHECK(lc.period == doctest::Approx(2 * kPi).epsilon(1e-6));
  const double r = std::hypot(lc.section_point.x, lc.section_point.y);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-8));
  // Divergence along the cycle: d/dr of r(1 - r^2) flow gives -2;
  // multiplier = exp(-2 * period) = exp(-4*pi).
  CHECK(lc.multiplier == doctest::Approx(std::exp(-4 * kPi)).epsilon(0.02));
  CHECK(!lc.near_unit);

  // Points returned trace the circle.
  for (const auto& p : lc.pts)
    CHECK(std::hypot(p.x, p.y) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("the same cycle becomes folded when the singular set cuts it") {
  const auto f = radial_field(0.0);  // line x = 0 crosses the unit circle
  const auto lc = find_limit_cycle(f, 0.0, {0.3, 0.2}, BBox{-3, -3, 3, 3});
  REQUIRE(lc.found);
  CHECK(lc.folded);
  CHECK(lc.sigma_crossings == 2);
  CHECK(lc.multiplier == doctest::Approx(std::exp(-4 * kPi)).epsilon(0.02));
}

TEST_CASE("no cycle is reported when the orbit spirals into an equilibrium") {
  // Globally attracting focus at the origin.
  const auto f = field_of("-x - y", "x - y", "1");
  const auto lc = find_limit_cycle(f, 0.0, {0.5, 0.5}, BBox{-3, -3, 3, 3});
  CHECK(!lc.found);
}

TEST_CASE("divergence of the radial field matches the closed form") {
  // div = 2(1 - r^2) - 4r^2 + ... compute at specific points instead: on
  // the unit circle div = -2 (the cycle's contraction rate).
  const auto f = radial_field(5.0);
  CHECK(f.divergence({1.0, 0.0}, 0.0) == doctest::Approx(-2.0));
  CHECK(f.divergence({0.0, -1.0}, 0.0) == doctest::Approx(-2.0));
  CHECK(f.divergence({0.0, 0.0}, 0.0) == doctest::Approx(2.0));
}
