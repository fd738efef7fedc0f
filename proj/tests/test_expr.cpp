// Expression parser, symbolic derivatives, and third-order jets, checked
// against hand values and high-order finite differences of eval() alone.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "dae/expr.hpp"
#include "dae/jet.hpp"

using dae::Expr;
using dae::Jet3;
using dae::JetExpr;
using dae::ParseError;
using dae::parse_expression;
using dae::Var;

namespace {

using P3 = std::array<double, 3>;
using Fn3 = std::function<double(const P3&)>;

// Fourth-order five-point central difference along one axis.
double fd4(const Fn3& f, P3 p, int axis, double h) {
  auto at = [&](double d) {
    P3 q = p;
    q[axis] += d;
    return f(q);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

// One Richardson step on fd4: sixth-order.
double fd6(const Fn3& f, const P3& p, int axis, double h) {
  return (16 * fd4(f, p, axis, h / 2) - fd4(f, p, axis, h)) / 15.0;
}

// Nested high-order differences for an arbitrary multi-index, larger steps
// on the outer (noisier) levels.
double fd_partial(const Fn3& f, const P3& p, std::array<int, 3> order) {
  const int total = order[0] + order[1] + order[2];
  if (total == 0) return f(p);
  int axis = 0;
  while (order[axis] == 0) ++axis;
  std::array<int, 3> rest = order;
  rest[axis] -= 1;
  const double h = total == 1 ? 2e-3 : total == 2 ? 1e-2 : 4e-2;
  const Fn3 inner = [&f, rest](const P3& q) { return fd_partial(f, q, rest); };
  return fd6(inner, p, axis, h);
}

Fn3 eval_fn(const Expr& e) {
  return [e](const P3& p) { return e.eval(p[0], p[1], p[2]); };
}

// Deterministic random expressions: moderate depth, no log/sqrt (their
// domains make random probing awkward), constants in [-2, 2].
Expr random_expr(std::mt19937& rng, int depth) {
  std::uniform_real_distribution<double> uc(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 4 : 11);
  switch (pick(rng)) {
    case 0: return Expr::variable(Var::X);
    case 1: return Expr::variable(Var::Y);
    case 2: return Expr::variable(Var::Alpha);
    case 3:
    case 4: return Expr::constant(uc(rng));
    case 5: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 6: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 7: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 8: return Expr::pow(random_expr(rng, depth - 1), 2 + (pick(rng) % 2));
    case 9: return Expr::apply(dae::UnaryFn::Sin, random_expr(rng, depth - 1));
    case 10: return Expr::apply(dae::UnaryFn::Cos, random_expr(rng, depth - 1));
    default: return Expr::apply(dae::UnaryFn::Tanh, random_expr(rng, depth - 1));
  }
}

struct JetEntry {
  std::array<int, 3> order;
  double Jet3::*member;
};

const JetEntry kJetEntries[] = {
    {{0, 0, 0}, &Jet3::v},   {{1, 0, 0}, &Jet3::x},   {{0, 1, 0}, &Jet3::y},
    {{0, 0, 1}, &Jet3::a},   {{2, 0, 0}, &Jet3::xx},  {{1, 1, 0}, &Jet3::xy},
    {{0, 2, 0}, &Jet3::yy},  {{1, 0, 1}, &Jet3::xa},  {{0, 1, 1}, &Jet3::ya},
    {{0, 0, 2}, &Jet3::aa},  {{3, 0, 0}, &Jet3::xxx}, {{2, 1, 0}, &Jet3::xxy},
    {{1, 2, 0}, &Jet3::xyy}, {{0, 3, 0}, &Jet3::yyy}, {{2, 0, 1}, &Jet3::xxa},
    {{1, 1, 1}, &Jet3::xya}, {{0, 2, 1}, &Jet3::yya}, {{1, 0, 2}, &Jet3::xaa},
    {{0, 1, 2}, &Jet3::yaa}, {{0, 0, 3}, &Jet3::aaa},
};

}  // namespace

TEST_CASE("parser evaluates standard forms") {
  const Expr e = parse_expression("x^2 + 3*y - sin(alpha)");
  CHECK(e.eval(2.0, 1.0, 0.0) == doctest::Approx(7.0));
  CHECK(e.eval(0.5, -1.0, 1.5) == doctest::Approx(0.25 - 3.0 - std::sin(1.5)));

  CHECK(parse_expression("-x^2").eval(3.0, 0, 0) == doctest::Approx(-9.0));
  CHECK(parse_expression("2 - 3 - 4").eval(0, 0, 0) == doctest::Approx(-5.0));
  CHECK(parse_expression("12/4/3").eval(0, 0, 0) == doctest::Approx(1.0));
  CHECK(parse_expression("2*(x + y)^3").eval(1.0, 1.0, 0) == doctest::Approx(16.0));
  CHECK(parse_expression("exp(log(2.5))").eval(0, 0, 0) == doctest::Approx(2.5));
  CHECK(parse_expression("tanh(0.3) + sqrt(9)").eval(0, 0, 0) ==
        doctest::Approx(std::tanh(0.3) + 3.0));
  CHECK(parse_expression("1e-3 + 2.5e2").eval(0, 0, 0) == doctest::Approx(250.001));
}

TEST_CASE("parser reports position and expectation on bad input") {
  auto offset_of = [](const char* src) -> std::size_t {
    try {
      parse_expression(src);
    } catch (const ParseError& e) {
      CHECK(!e.expected.empty());
      return e.offset;
    }
    FAIL("no ParseError for: ", src);
    return 0;
  };
  CHECK(offset_of("x + ") == 4);
  CHECK(offset_of("x + * y") == 4);
  CHECK(offset_of("(x + y") == 6);
  CHECK(offset_of("x ^ y") == 4);     // exponents are integer literals
  CHECK(offset_of("foo(x)") <= 3);    // unknown function name
  CHECK(offset_of("x y") == 2);       // trailing garbage
  CHECK_THROWS_AS(parse_expression(""), ParseError);
}

TEST_CASE("out-of-domain arguments propagate non-finite values, no throw") {
  const Expr e = parse_expression("log(x) + sqrt(y) + 1/alpha");
  CHECK(std::isnan(e.eval(-1.0, 1.0, 1.0)));
  CHECK(std::isnan(e.eval(1.0, -1.0, 1.0)));
  CHECK(std::isinf(e.eval(1.0, 1.0, 0.0)));
}

TEST_CASE("text form round-trips through the parser") {
  std::mt19937 rng(12021);
  std::uniform_real_distribution<double> up(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Expr e = random_expr(rng, 3);
    const Expr back = parse_expression(e.str());
    for (int k = 0; k < 5; ++k) {
      const double x = up(rng), y = up(rng), a = up(rng);
      const double v1 = e.eval(x, y, a), v2 = back.eval(x, y, a);
      if (std::isfinite(v1))
        CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
    }
  }
}

TEST_CASE("symbolic derivative matches finite differences") {
  const char* exprs[] = {
      "x^3 - 2*x*y + alpha^2",
      "sin(x)*cos(y) + exp(alpha*x)",
      "tanh(x + y) * (1 - alpha)",
      "x / (1 + y^2)",
      "sqrt(4 + x^2)",
      "log(2 + cos(x + alpha))",
  };
  const P3 p{0.4, -0.3, 0.25};
  for (const char* src : exprs) {
    CAPTURE(src);
    const Expr e = parse_expression(src);
    for (int axis = 0; axis < 3; ++axis) {
      const double sym =
          e.derivative(static_cast<Var>(axis)).eval(p[0], p[1], p[2]);
      std::array<int, 3> ord{0, 0, 0};
      ord[axis] = 1;
      const double fd = fd_partial(eval_fn(e), p, ord);
      CHECK(std::abs(sym - fd) <= 1e-8 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("all jet entries match high-order finite differences") {
  std::mt19937 rng(90210);
  std::uniform_real_distribution<double> up(-1.0, 1.0);
  int tested = 0;
  while (tested < 40) {
    const Expr e = random_expr(rng, 3);
    const JetExpr je(e);
    const P3 p{up(rng), up(rng), up(rng)};
    const Jet3 jet = je.jet_unchecked(p[0], p[1], p[2]);
    // Skip wild samples: the oracle is only meaningful on tame ones.
    bool tame = true;
    for (const JetEntry& en : kJetEntries)
      tame = tame && std::isfinite(jet.*(en.member)) && std::abs(jet.*(en.member)) < 1e3;
    if (!tame) continue;
    ++tested;
    for (const JetEntry& en : kJetEntries) {
      const double fd = fd_partial(eval_fn(e), p, en.order);
      const double got = jet.*(en.member);
      CAPTURE(en.order[0]);
      CAPTURE(en.order[1]);
      CAPTURE(en.order[2]);
      CHECK(std::abs(got - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("partial() composes repeated symbolic derivatives") {
  const JetExpr je(parse_expression("sin(x*y) + alpha*x^3"));
  const Expr d = je.partial(2, 1, 0);  // d^3 / dx^2 dy
  const Expr ref = parse_expression("sin(x*y) + alpha*x^3")
                       .derivative(Var::X)
                       .derivative(Var::X)
                       .derivative(Var::Y);
  for (double x : {-0.7, 0.3, 1.1})
    for (double y : {-0.2, 0.8})
      CHECK(d.eval(x, y, 0.5) == doctest::Approx(ref.eval(x, y, 0.5)).epsilon(1e-12));
}

TEST_CASE("dependency and constant queries") {
  const Expr e = parse_expression("x^2 + alpha");
  CHECK(e.depends_on(Var::X));
  CHECK(!e.depends_on(Var::Y));
  CHECK(e.depends_on(Var::Alpha));
  CHECK(parse_expression("0*x").is_constant(0.0));
  CHECK(parse_expression("3").is_constant(3.0));
  CHECK(!parse_expression("x").is_constant(0.0));
}

TEST_CASE("gradient agrees with jet first-order entries") {
  const JetExpr je(parse_expression("exp(x)*cos(y) - alpha*x"));
  const auto g = je.gradient(0.3, -0.4, 0.9);
  const Jet3 j = je.jet(0.3, -0.4, 0.9);
  CHECK(g[0] == doctest::Approx(j.x).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(j.y).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(j.a).epsilon(1e-14));
  CHECK(je.value(0.3, -0.4, 0.9) == doctest::Approx(j.v).epsilon(1e-14));
}
