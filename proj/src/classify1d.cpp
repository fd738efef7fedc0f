#include "dae/classify1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dae::d1 {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Counts how many of the leading derivatives vanish (within tol); stops at
// the first nonzero.  Values beyond the stored jet order count as capped.
int count_vanishing(const double* derivs, int count, double tol, bool& capped) {
  int m = 0;
  while (m < count && std::abs(derivs[m]) <= tol) ++m;
  capped = (m == count);
  return m;
}

// Newton iteration on a scalar function secured by a sign-change bracket.
double refine_bracketed(const JetExpr& h, double alpha, double a, double b, double fa,
                        const Tol& tol) {
  double x = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double f = h.value(x, 0.0, alpha);
    if (std::abs(f) <= 1e-3 * tol.newton) break;
    if ((f < 0.0) == (fa < 0.0)) {
      a = x;
      fa = f;
    } else {
      b = x;
    }
    const double fp = h.gradient(x, 0.0, alpha)[0];
    double xn = x - f / fp;
    if (!std::isfinite(xn) || xn <= a || xn >= b) xn = 0.5 * (a + b);
    if (xn == x) break;
    x = xn;
  }
  return x;
}

// Plain Newton refinement from a nearby guess (used for tangential roots and
// event polishing where no bracket exists).
double refine_newton(const JetExpr& h, double alpha, double x, int iters = 60) {
  for (int it = 0; it < iters; ++it) {
    const double f = h.value(x, 0.0, alpha);
    const double fp = h.gradient(x, 0.0, alpha)[0];
    if (!std::isfinite(f) || !std::isfinite(fp) || fp == 0.0) break;
    const double xn = x - f / fp;
    if (!std::isfinite(xn) || xn == x) break;
    x = xn;
    if (std::abs(f) <= 1e-16) break;
  }
  return x;
}

// All roots of h(., alpha) in the range: sign-change brackets plus
// even-multiplicity roots detected as near-zero local minima of |h|.
std::vector<double> find_roots(const JetExpr& h, double alpha, Interval range, int grid_n,
                               const Tol& tol) {
  std::vector<double> roots;
  if (grid_n < 2) grid_n = 2;
  const double dx = range.length() / grid_n;
  std::vector<double> v(grid_n + 1);
  double scale = 0.0;
  for (int i = 0; i <= grid_n; ++i) {
    v[i] = h.value(range.lo + i * dx, 0.0, alpha);
    if (std::isfinite(v[i])) scale = std::max(scale, std::abs(v[i]));
  }
  if (scale == 0.0) return roots;  // identically zero on the grid: nothing isolated

  for (int i = 0; i < grid_n; ++i) {
    if (!std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
    const double xa = range.lo + i * dx, xb = range.lo + (i + 1) * dx;
    if (v[i] == 0.0) {
      roots.push_back(xa);
    } else if ((v[i] < 0.0) != (v[i + 1] < 0.0)) {
      roots.push_back(refine_bracketed(h, alpha, xa, xb, v[i], tol));
    }
  }
  if (v[grid_n] == 0.0) roots.push_back(range.hi);

  // Tangential (even-multiplicity) roots: |h| dips to ~0 without a sign
  // change.  Polish the critical point of h and accept if h vanishes there.
  const JetExpr* hp = nullptr;  // derivative accessed through the jet instead
  (void)hp;
  for (int i = 0; i <= grid_n; ++i) {
    if (!std::isfinite(v[i]) || std::abs(v[i]) > 1e-2 * scale) continue;
    const bool local_min = (i == 0 || std::abs(v[i]) <= std::abs(v[i - 1])) &&
                           (i == grid_n || std::abs(v[i]) <= std::abs(v[i + 1]));
    const bool crossing = (i > 0 && (v[i - 1] < 0.0) != (v[i] < 0.0)) ||
                          (i < grid_n && (v[i] < 0.0) != (v[i + 1] < 0.0));
    if (!local_min || crossing) continue;
    // Newton on h' to land on the critical point.
    double xc = range.lo + i * dx;
    for (int it = 0; it < 60; ++it) {
      const Jet3 j = h.jet_unchecked(xc, 0.0, alpha);
      if (!std::isfinite(j.x) || !std::isfinite(j.xx) || j.xx == 0.0) break;
      const double xn = xc - j.x / j.xx;
      if (!std::isfinite(xn) || xn == xc) break;
      xc = xn;
      if (std::abs(j.x) <= 1e-16 * std::max(1.0, scale)) break;
    }
    if (xc >= range.lo - 0.5 * dx && xc <= range.hi + 0.5 * dx &&
        std::abs(h.value(xc, 0.0, alpha)) <= tol.residual)
      roots.push_back(std::clamp(xc, range.lo, range.hi));
  }

  std::sort(roots.begin(), roots.end());
  // Collapse duplicates of the same root (distinct refinements agree to
  // machine level, far below the residual tolerance).
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > tol.residual) out.push_back(r);
  return out;
}

}  // namespace

Point1DClass classify_point_1d(const System1D& sys, double x, double alpha, const Tol& tol) {
  const Jet3 fj = sys.f.jet(x, 0.0, alpha);
  const Jet3 gj = sys.g.jet(x, 0.0, alpha);
  const bool f0 = std::abs(fj.v) <= tol.residual;
  const bool g0 = std::abs(gj.v) <= tol.residual;

  if (f0 && g0) {
    bool cf = false, cg = false;
    const double fd[3] = {fj.x, fj.xx, fj.xxx};
    const double gd[3] = {gj.x, gj.xx, gj.xxx};
    const int m = count_vanishing(fd, 3, tol.deriv, cf);
    const int n = count_vanishing(gd, 3, tol.deriv, cg);
    return SingularEquilibrium{m, n, cf || cg};
  }
  if (f0) {
    if (std::abs(fj.x) > tol.deriv) {
      const double lambda = fj.x / gj.v;
      return SimpleEquilibrium{lambda, lambda < 0.0};
    }
    if (std::abs(fj.xx) > tol.deriv) return NonSimpleEquilibrium{1, sign_of(fj.xx / gj.v), false};
    if (std::abs(fj.xxx) > tol.deriv) return NonSimpleEquilibrium{2, sign_of(fj.xxx / gj.v), false};
    return NonSimpleEquilibrium{3, 0, true};
  }
  if (g0) {
    if (std::abs(gj.x) > tol.deriv) {
      const double lambda = gj.x / fj.v;
      return SimpleSingularity{lambda, lambda > 0.0};
    }
    if (std::abs(gj.xx) > tol.deriv) return NonSimpleSingularity{1, sign_of(gj.xx / fj.v), false};
    if (std::abs(gj.xxx) > tol.deriv) return NonSimpleSingularity{2, sign_of(gj.xxx / fj.v), false};
    return NonSimpleSingularity{3, 0, true};
  }
  return RegularPoint{};
}

const char* class_name(const Point1DClass& cls) {
  struct Visitor {
    const char* operator()(const RegularPoint&) const { return "regular-point"; }
    const char* operator()(const SimpleEquilibrium&) const { return "simple-equilibrium"; }
    const char* operator()(const SimpleSingularity&) const { return "simple-singularity"; }
    const char* operator()(const NonSimpleEquilibrium&) const { return "non-simple-equilibrium"; }
    const char* operator()(const NonSimpleSingularity&) const { return "non-simple-singularity"; }
    const char* operator()(const SingularEquilibrium&) const { return "singular-equilibrium"; }
  };
  return std::visit(Visitor{}, cls);
}

bool is_simple(const Point1DClass& cls) {
  return std::holds_alternative<SimpleEquilibrium>(cls) ||
         std::holds_alternative<SimpleSingularity>(cls);
}

FindResult1D find_special_points_1d(const System1D& sys, double alpha, Interval range, int grid_n,
                                    const Tol& tol) {
  FindResult1D out;
  const std::vector<double> rf = find_roots(sys.f, alpha, range, grid_n, tol);
  const std::vector<double> rg = find_roots(sys.g, alpha, range, grid_n, tol);
  const double merge_r = tol.merge_radius();

  std::vector<bool> g_used(rg.size(), false);
  std::vector<double> xs;
  for (double x : rf) {
    bool merged = false;
    for (std::size_t j = 0; j < rg.size(); ++j) {
      if (!g_used[j] && std::abs(rg[j] - x) <= merge_r) {
        // A root of f and a root of g meeting: one singular equilibrium.
        xs.push_back(0.5 * (x + rg[j]));
        g_used[j] = true;
        merged = true;
        break;
      }
    }
    if (!merged) xs.push_back(x);
  }
  for (std::size_t j = 0; j < rg.size(); ++j)
    if (!g_used[j]) xs.push_back(rg[j]);
  std::sort(xs.begin(), xs.end());

  for (double x : xs) out.points.push_back({x, classify_point_1d(sys, x, alpha, tol)});

  // Same-function root clusters survive the merge; flag them.
  for (std::size_t i = 1; i < out.points.size(); ++i)
    if (out.points[i].x - out.points[i - 1].x <= merge_r)
      out.warnings.push_back("root cluster: points at x = " + fmt(out.points[i - 1].x) +
                             " and x = " + fmt(out.points[i].x) + " are closer than the merge radius");
  return out;
}

NormalForm1D normal_form_A11(const System1D& sys, double x, double alpha, const Tol& tol) {
  const Jet3 fj = sys.f.jet(x, 0.0, alpha);
  const Jet3 gj = sys.g.jet(x, 0.0, alpha);
  if (std::abs(fj.v) > tol.residual || std::abs(fj.x) > tol.deriv)
    throw std::invalid_argument("normal_form_A11: point is not a degenerate equilibrium (f = f_x = 0)");
  if (std::abs(gj.v) <= tol.residual)
    throw std::invalid_argument("normal_form_A11: g vanishes at the point");
  if (std::abs(fj.xx) <= tol.deriv)
    throw std::invalid_argument("normal_form_A11: f_xx = 0, degeneracy order exceeds A1.1");

  NormalForm1D nf;
  nf.nf_case = NFCase::A11;
  nf.s = sign_of(fj.xx / gj.v);
  const double a = fj.xx / (2.0 * gj.v);
  if (std::abs(fj.a) <= tol.deriv) {
    nf.degenerate = true;
    nf.note = "f_alpha = 0 within tolerance: codimension >= 2 in this one-parameter family";
  } else {
    nf.dbeta_dalpha = (fj.a / gj.v) * std::pow(std::abs(a), -1.0 / 3.0);
  }
  return nf;
}

NormalForm1D normal_form_A21(const System1D& sys, double x, double alpha, const Tol& tol) {
  const Jet3 fj = sys.f.jet(x, 0.0, alpha);
  const Jet3 gj = sys.g.jet(x, 0.0, alpha);
  if (std::abs(gj.v) > tol.residual || std::abs(gj.x) > tol.deriv)
    throw std::invalid_argument("normal_form_A21: point is not a degenerate singularity (g = g_x = 0)");
  if (std::abs(fj.v) <= tol.residual)
    throw std::invalid_argument("normal_form_A21: f vanishes at the point");
  if (std::abs(gj.xx) <= tol.deriv)
    throw std::invalid_argument("normal_form_A21: g_xx = 0, degeneracy order exceeds A2.1");

  NormalForm1D nf;
  nf.nf_case = NFCase::A21;
  nf.s = sign_of(gj.xx / fj.v);
  const double a = gj.xx / (2.0 * fj.v);
  if (std::abs(gj.a) <= tol.deriv) {
    nf.degenerate = true;
    nf.note = "g_alpha = 0 within tolerance: codimension >= 2 in this one-parameter family";
  } else {
    nf.dbeta_dalpha = (gj.a / fj.v) * std::pow(std::abs(a), -1.0 / 3.0);
  }
  return nf;
}

NormalForm1D normal_form_A300(const System1D& sys, double x, double alpha, const Tol& tol) {
  const Jet3 fj = sys.f.jet(x, 0.0, alpha);
  const Jet3 gj = sys.g.jet(x, 0.0, alpha);
  if (std::abs(fj.v) > tol.residual || std::abs(gj.v) > tol.residual)
    throw std::invalid_argument("normal_form_A300: point is not a singular equilibrium (f = g = 0)");
  if (std::abs(fj.x) <= tol.deriv || std::abs(gj.x) <= tol.deriv)
    throw std::invalid_argument("normal_form_A300: f_x or g_x vanishes, degeneracy order exceeds A3.0,0");

  NormalForm1D nf;
  nf.nf_case = NFCase::A300;
  nf.s = sign_of(fj.x / gj.x);
  nf.A = gj.x * fj.a - fj.x * gj.a;
  nf.dbeta_dalpha = nf.A / (fj.x * fj.x);
  if (std::abs(nf.A) <= tol.deriv) {
    nf.degenerate = true;
    nf.note = "transversality determinant A = 0 within tolerance: degenerate family";
  }
  return nf;
}

Perturbation1D construct_unfolding_perturbation(NFCase nf_case, int m, int n,
                                                const std::vector<int>& mult_a,
                                                const std::vector<int>& mult_b,
                                                const std::vector<double>& coords_x,
                                                const std::vector<double>& coords_y) {
  Perturbation1D out;
  const bool use_f = nf_case == NFCase::A11 || nf_case == NFCase::A300;
  const bool use_g = nf_case == NFCase::A21 || nf_case == NFCase::A300;

  auto validate = [](const std::vector<int>& mult, const std::vector<double>& coords, int bound,
                     const char* which) {
    if (mult.size() != coords.size())
      throw std::invalid_argument(std::string("construct_unfolding_perturbation: ") + which +
                                  " multiplicities and coordinates differ in length");
    for (std::size_t i = 1; i < coords.size(); ++i)
      if (!(coords[i] > coords[i - 1]))
        throw std::invalid_argument(std::string("construct_unfolding_perturbation: ") + which +
                                    " coordinates must be strictly increasing");
    int sum = 0;
    for (int a : mult) {
      if (a < 1)
        throw std::invalid_argument(std::string("construct_unfolding_perturbation: ") + which +
                                    " multiplicities must be >= 1");
      sum += a;
    }
    if (sum > bound)
      throw std::invalid_argument(std::string("construct_unfolding_perturbation: ") + which +
                                  " multiplicity sum exceeds the degeneracy bound");
    return sum;
  };

  auto build_poly = [](const std::vector<int>& mult, const std::vector<double>& coords) {
    Expr p = Expr::constant(1.0);
    const Expr x = Expr::variable(Var::X);
    for (std::size_t i = 0; i < mult.size(); ++i)
      p = p * Expr::pow(x - Expr::constant(coords[i]), mult[i]);
    return p;
  };

  Expr f = Expr::constant(1.0);
  Expr g = Expr::constant(1.0);
  if (use_f) {
    const int sum = validate(mult_a, coords_x, m + 1, "equilibrium");
    if ((m + 1 - sum) % 2 != 0)
      out.warnings.push_back(
          "parity: equilibrium multiplicity sum " + std::to_string(sum) +
          " differs in parity from " + std::to_string(m + 1) +
          "; this pattern cannot arise from a small perturbation of the degree-" +
          std::to_string(m + 1) + " normal form");
    f = build_poly(mult_a, coords_x);
  }
  if (use_g) {
    const int sum = validate(mult_b, coords_y, n + 1, "singularity");
    if ((n + 1 - sum) % 2 != 0)
      out.warnings.push_back(
          "parity: singularity multiplicity sum " + std::to_string(sum) +
          " differs in parity from " + std::to_string(n + 1) +
          "; this pattern cannot arise from a small perturbation of the degree-" +
          std::to_string(n + 1) + " normal form");
    g = build_poly(mult_b, coords_y);
  }
  out.sys = make_system_1d(f, g, "perturbation");
  return out;
}

Stability1D structural_stability_1d(const System1D& sys, double alpha, Interval range, int grid_n,
                                    const Tol& tol) {
  Stability1D out;
  const FindResult1D found = find_special_points_1d(sys, alpha, range, grid_n, tol);
  for (const SpecialPoint1D& p : found.points) {
    if (!is_simple(p.cls)) {
      out.violations.push_back(p);
      out.notes.push_back(std::string(class_name(p.cls)) + " at x = " + fmt(p.x));
    } else if (p.x - range.lo <= tol.residual || range.hi - p.x <= tol.residual) {
      out.violations.push_back(p);
      out.notes.push_back("special point at x = " + fmt(p.x) + " lies on the interval boundary");
    }
  }
  out.stable = out.violations.empty();
  return out;
}

Orbit1D simulate_1d(const System1D& sys, double x0, double alpha, double t_max,
                    const SimOptions1D& opt) {
  if (std::abs(sys.g.value(x0, 0.0, alpha)) <= opt.g_stop)
    throw std::domain_error("simulate_1d: initial condition lies on the singular set");

  Orbit1D orbit;
  orbit.samples.push_back({0.0, x0});

  auto field = [&](double, const StateN<1>& y) -> StateN<1> {
    return {sys.f.value(y[0], 0.0, alpha) / sys.g.value(y[0], 0.0, alpha)};
  };
  auto g_at = [&](double x) { return sys.g.value(x, 0.0, alpha); };

  bool done = false;

  // Common arrival handling for both detection paths (threshold dip on a
  // dense step, or step-size collapse against the singular set): classify
  // the refined root and close the time integral.
  auto arrive = [&](double t_hit, double x_hit, double x_star) {
    const double f_star = sys.f.value(x_star, 0.0, alpha);
    if (std::abs(f_star) <= 100.0 * opt.g_stop) {
      // f and g vanish together: the flow crosses a singular equilibrium,
      // not a true impasse; report the point as an equilibrium arrival.
      orbit.event = SimEvent1D::ReachedEquilibrium;
      orbit.t_end = t_hit;
      orbit.x_end = x_star;
      orbit.samples.push_back({t_hit, x_hit});
      done = true;
      return;
    }
    // Arrival time: integrated time to the handoff point plus the exact
    // remainder integral dt = (g/f) dx over [x_hit, x*].
    static constexpr double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                       0.5384693101056831, 0.9061798459386640};
    static constexpr double gl_w[5] = {0.2369268850561891, 0.4786286704993665,
                                       0.5688888888888889, 0.4786286704993665,
                                       0.2369268850561891};
    const double mid = 0.5 * (x_star + x_hit), half = 0.5 * (x_star - x_hit);
    double rem = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double xq = mid + half * gl_x[k];
      rem += gl_w[k] * sys.g.value(xq, 0.0, alpha) / sys.f.value(xq, 0.0, alpha);
    }
    rem *= half;
    orbit.event = SimEvent1D::ReachedSingularity;
    orbit.x_star = x_star;
    orbit.t_star = t_hit + rem;
    orbit.t_end = t_hit;
    orbit.x_end = x_hit;
    orbit.samples.push_back({t_hit, x_hit});
    done = true;
  };

  auto observer = [&](const OdeStep<1>& step) {
    // Scan the step (ends plus interior samples) for a |g| dip below the
    // arrival threshold; adaptive steps shrink near the singular set, so a
    // coarse scan suffices to bracket the first crossing.
    double t_hit = -1.0;
    const double g_begin = std::abs(g_at(step.y0[0]));
    for (int k = 1; k <= 8; ++k) {
      const double t = step.t0 + (step.t1 - step.t0) * k / 8.0;
      if (std::abs(g_at(step.interp(t)[0])) <= opt.g_stop) {
        // Bisection on |g| - g_stop over [step.t0, t].
        double ta = step.t0, tb = t;
        for (int it = 0; it < 200 && tb - ta > 1e-16 * std::max(1.0, std::abs(tb)); ++it) {
          const double tm = 0.5 * (ta + tb);
          if (std::abs(g_at(step.interp(tm)[0])) <= opt.g_stop)
            tb = tm;
          else
            ta = tm;
        }
        t_hit = tb;
        break;
      }
    }
    if (t_hit >= 0.0 && g_begin > opt.g_stop) {
      const double x_hit = step.interp(t_hit)[0];
      arrive(t_hit, x_hit, refine_newton(sys.g, alpha, x_hit));
      return ObserverAction::Stop;
    }

    const double x1 = step.y1[0];
    if (x1 < opt.domain.lo || x1 > opt.domain.hi) {
      const double bound = x1 < opt.domain.lo ? opt.domain.lo : opt.domain.hi;
      double ta = step.t0, tb = step.t1;
      for (int it = 0; it < 200 && tb - ta > 1e-16 * std::max(1.0, std::abs(tb)); ++it) {
        const double tm = 0.5 * (ta + tb);
        const double xm = step.interp(tm)[0];
        if ((bound == opt.domain.lo && xm < bound) || (bound == opt.domain.hi && xm > bound))
          tb = tm;
        else
          ta = tm;
      }
      orbit.event = SimEvent1D::LeftDomain;
      orbit.t_end = ta;
      orbit.x_end = bound;
      orbit.samples.push_back({ta, bound});
      done = true;
      return ObserverAction::Stop;
    }

    orbit.samples.push_back({step.t1, x1});
    const double fx = sys.f.value(x1, 0.0, alpha);
    const double gx = sys.g.value(x1, 0.0, alpha);
    if (std::abs(fx / gx) <= opt.speed_stop) {
      const double lambda = sys.f.gradient(x1, 0.0, alpha)[0] / gx;
      if (lambda < 0.0) {
        // Asymptotic convergence: the equilibrium is never attained in finite
        // time, so report the point where the orbit effectively stops rather
        // than the limiting root.
        orbit.event = SimEvent1D::ReachedEquilibrium;
        orbit.t_end = step.t1;
        orbit.x_end = x1;
        done = true;
        return ObserverAction::Stop;
      }
    }
    return ObserverAction::Continue;
  };

  OdeOptions ode = opt.ode;
  ode.h_init = std::min(1e-3, t_max / 16.0);
  const auto dense = integrate_ode<1>(field, StateN<1>{x0}, 0.0, t_max, ode, observer);

  if (!done && dense.status == OdeStatus::StepUnderflow && !dense.steps.empty()) {
    // The step size collapsed: the orbit is pressing into the singular set
    // faster than the error control can track, which happens whenever the
    // arrival threshold sits below the integrator's resolution of the
    // blow-up.  Hand over to the remainder quadrature from the stall point,
    // provided that point really sits against a nearby simple root of g and
    // is moving toward it.
    const double t_last = dense.steps.back().t1;
    const double x_last = dense.steps.back().y1[0];
    const double g_last = g_at(x_last);
    const double x_star = refine_newton(sys.g, alpha, x_last);
    const bool near_root = std::isfinite(x_star) &&
                           std::abs(x_star - x_last) <= 1e-3 * (1.0 + std::abs(x_last)) &&
                           std::abs(g_at(x_star)) <= 1e-6 * std::abs(g_last);
    if (near_root) {
      const double v = sys.f.value(x_last, 0.0, alpha) / g_last;
      if (x_star == x_last || (v > 0.0) == (x_star > x_last)) arrive(t_last, x_last, x_star);
    }
  }

  if (!done) {
    orbit.event = SimEvent1D::TimeOut;
    orbit.t_end = orbit.samples.back().first;
    orbit.x_end = orbit.samples.back().second;
  }
  return orbit;
}

}  // namespace dae::d1
