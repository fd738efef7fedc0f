// Newton kernels and grid sampling: convergence on known roots, graceful
// failure on singular Jacobians, and bitwise serial/parallel agreement.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "dae/kernels.hpp"
#include "dae/linalg.hpp"

using dae::BBox;
using dae::Exec;
using dae::NewtonOptions;
using dae::NewtonOutcome;

namespace {

using V2 = std::array<double, 2>;
using M2 = std::array<double, 4>;

// Circle/line intersection: x^2 + y^2 = 2, x = y; roots at (1,1), (-1,-1).
const std::function<V2(const V2&)> kCircleF = [](const V2& p) {
  return V2{p[0] * p[0] + p[1] * p[1] - 2.0, p[0] - p[1]};
};
const std::function<M2(const V2&)> kCircleJ = [](const V2& p) {
  return M2{2 * p[0], 2 * p[1], 1.0, -1.0};
};

}  // namespace

TEST_CASE("damped newton converges quadratically on a regular root") {
  const auto out = dae::damped_newton<2>(kCircleF, kCircleJ, {2.0, 0.5});
  REQUIRE(out.converged);
  CHECK(out.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.x[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.residual <= 1e-12);
  CHECK(out.iters <= 12);
}

TEST_CASE("damped newton survives an overshooting start via backtracking") {
  // Scalar-in-disguise: f(x) = tanh(4x) has tiny derivative far out, so an
  // undamped step from x=3 overshoots wildly.  Damping must rein it in.
  const std::function<V2(const V2&)> F = [](const V2& p) {
    return V2{std::tanh(4 * p[0]), p[1]};
  };
  const std::function<M2(const V2&)> J = [](const V2& p) {
    const double c = std::cosh(4 * p[0]);
    return M2{4.0 / (c * c), 0.0, 0.0, 1.0};
  };
  const auto out = dae::damped_newton<2>(F, J, {3.0, 1.0});
  REQUIRE(out.converged);
  CHECK(std::abs(out.x[0]) <= 1e-10);
}

TEST_CASE("damped newton reports failure on a singular jacobian") {
  const std::function<V2(const V2&)> F = [](const V2& p) {
    return V2{p[0] * p[0], p[0] * p[0] + 1.0};  // no root, rank-1 J
  };
  const std::function<M2(const V2&)> J = [](const V2& p) {
    return M2{2 * p[0], 0.0, 2 * p[0], 0.0};
  };
  const auto out = dae::damped_newton<2>(F, J, {0.7, 0.0});
  CHECK(!out.converged);
  CHECK(out.iters <= NewtonOptions{}.max_iter);
}

TEST_CASE("multistart results are slot-aligned and serial == parallel bitwise") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<V2> seeds(500);
  for (auto& s : seeds) s = {u(rng), u(rng)};

  const auto ser = dae::multistart_newton<2>(kCircleF, kCircleJ, seeds, {}, Exec::Serial);
  const auto par = dae::multistart_newton<2>(kCircleF, kCircleJ, seeds, {}, Exec::Parallel);
  REQUIRE(ser.size() == seeds.size());
  REQUIRE(par.size() == seeds.size());
  int converged = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    CHECK(ser[i].converged == par[i].converged);
    CHECK(std::memcmp(ser[i].x.data(), par[i].x.data(), sizeof ser[i].x) == 0);
    CHECK(ser[i].residual == par[i].residual);
    CHECK(ser[i].iters == par[i].iters);
    if (ser[i].converged) {
      ++converged;
      // Every converged slot lands on one of the two true roots.
      const double s = ser[i].x[0];
      CHECK(std::abs(std::abs(s) - 1.0) <= 1e-9);
      CHECK(ser[i].x[1] == doctest::Approx(s).epsilon(1e-9));
    }
  }
  CHECK(converged > 400);  // nearly all seeds find a root for this system
}

TEST_CASE("three-dimensional newton solves a mixed polynomial system") {
  using V3 = std::array<double, 3>;
  using M3 = std::array<double, 9>;
  // x + y + a = 6, x*y = 2, a^2 = 9 with root (1, 2, 3) among others.
  const std::function<V3(const V3&)> F = [](const V3& p) {
    return V3{p[0] + p[1] + p[2] - 6.0, p[0] * p[1] - 2.0, p[2] * p[2] - 9.0};
  };
  const std::function<M3(const V3&)> J = [](const V3& p) {
    return M3{1, 1, 1, p[1], p[0], 0, 0, 0, 2 * p[2]};
  };
  const auto out = dae::damped_newton<3>(F, J, {0.9, 2.2, 2.8});
  REQUIRE(out.converged);
  CHECK(out.x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(out.x[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(out.x[2] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("grid_eval covers corners in row-major x-fastest order") {
  const BBox box{0.0, 10.0, 2.0, 14.0};
  const auto vals = dae::grid_eval([](double x, double y) { return x + 100 * y; },
                                   box, 3, 5, Exec::Serial);
  REQUIRE(vals.size() == 15);
  CHECK(vals[0] == doctest::Approx(0.0 + 1000.0));    // (x0, y0)
  CHECK(vals[1] == doctest::Approx(1.0 + 1000.0));    // x step = 1
  CHECK(vals[2] == doctest::Approx(2.0 + 1000.0));    // (x1, y0)
  CHECK(vals[3] == doctest::Approx(0.0 + 1100.0));    // next row: y step = 1
  CHECK(vals[14] == doctest::Approx(2.0 + 1400.0));   // (x1, y1)
}

TEST_CASE("grid_eval serial == parallel bitwise") {
  const BBox box{-1.3, -0.7, 2.1, 0.9};
  const auto f = [](double x, double y) { return std::sin(3 * x) * std::exp(y) - x * y; };
  const auto a = dae::grid_eval(f, box, 41, 37, Exec::Serial);
  const auto b = dae::grid_eval(f, box, 41, 37, Exec::Parallel);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("linear solves and eigen helpers behave on hand cases") {
  const dae::Mat2 m{3.0, 1.0, 1.0, 3.0};
  CHECK(m.det() == doctest::Approx(8.0));
  CHECK(m.trace() == doctest::Approx(6.0));
  // Eigenvalues come back ascending by (real, imag).
  const auto ev = dae::eigenvalues(m);
  CHECK(ev.first.real() == doctest::Approx(2.0));
  CHECK(ev.second.real() == doctest::Approx(4.0));

  dae::Vec2 rhs{5.0, 7.0}, sol{};
  REQUIRE(dae::solve(m, rhs, sol));
  CHECK(sol.x == doctest::Approx(1.0));
  CHECK(sol.y == doctest::Approx(2.0));

  const dae::Mat2 sing{1.0, 2.0, 2.0, 4.0};
  CHECK(!dae::solve(sing, rhs, sol));

  const dae::Mat3 t{{2, 0, 0, 0, 3, 0, 0, 0, 4}};
  CHECK(t.det() == doctest::Approx(24.0));
}
