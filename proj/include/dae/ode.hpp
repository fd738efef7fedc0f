// Adaptive explicit Runge-Kutta 4(5) integrator (Dormand-Prince pair) with
// cubic-Hermite dense output.  Works forward or backward in time; callers
// monitor events on the accepted-step stream via an observer callback.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace dae {

template <int N>
using StateN = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-4;
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 1e-14;
  int max_steps = 1000000;
};

enum class OdeStatus { ReachedEnd, StoppedByObserver, StepUnderflow, MaxSteps };

template <int N>
struct OdeStep {
  double t0 = 0.0, t1 = 0.0;
  StateN<N> y0{}, y1{}, f0{}, f1{};

  // Cubic Hermite interpolation on [t0, t1] (order matches the step sizes
  // chosen at tight tolerances).
  StateN<N> interp(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    StateN<N> y;
    for (int i = 0; i < N; ++i)
      y[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    return y;
  }
};

template <int N>
struct DenseOrbit {
  std::vector<OdeStep<N>> steps;
  OdeStatus status = OdeStatus::ReachedEnd;

  bool empty() const { return steps.empty(); }
  double t_begin() const { return steps.empty() ? 0.0 : steps.front().t0; }
  double t_end() const { return steps.empty() ? 0.0 : steps.back().t1; }

  StateN<N> at(double t) const {
    // Steps are monotone in |t - t_begin|; binary search over signed time.
    const bool fwd = t_end() >= t_begin();
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const bool beyond = fwd ? (t > steps[mid].t1) : (t < steps[mid].t1);
      if (beyond)
        lo = mid + 1;
      else
        hi = mid;
    }
    return steps[lo].interp(t);
  }
};

enum class ObserverAction { Continue, Stop };

// Integrates y' = field(t, y) from (t0, y0) to t1.  The observer is invoked
// after every accepted step and may stop the integration.
template <int N, class Field, class Observer>
DenseOrbit<N> integrate_ode(Field&& field, StateN<N> y0, double t0, double t1,
                            const OdeOptions& opt, Observer&& observer) {
  // Dormand-Prince 5(4) coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  DenseOrbit<N> orbit;
  if (t1 == t0) return orbit;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  StateN<N> y = y0;
  StateN<N> k1 = field(t, y);
  double h = dir * std::min(std::abs(opt.h_init), std::abs(t1 - t0));

  for (int step = 0; step < opt.max_steps; ++step) {
    if (dir * (t1 - t) <= 0.0) {
      orbit.status = OdeStatus::ReachedEnd;
      return orbit;
    }
    if (std::abs(h) > dir * (t1 - t)) h = t1 - t;
    if (std::abs(h) > opt.h_max) h = dir * opt.h_max;

    StateN<N> k2, k3, k4, k5, k6, k7, yt, y_new, err;
    for (int i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
    k2 = field(t + c2 * h, yt);
    for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = field(t + c3 * h, yt);
    for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = field(t + c4 * h, yt);
    for (int i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = field(t + c5 * h, yt);
    for (int i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = field(t + h, yt);
    for (int i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = field(t + h, y_new);

    double err_norm = 0.0;
    bool finite = true;
    for (int i = 0; i < N; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / sc);
      finite = finite && std::isfinite(y_new[i]) && std::isfinite(err[i]);
    }

    if (!finite) {
      h *= 0.25;
      if (std::abs(h) < opt.h_min) {
        orbit.status = OdeStatus::StepUnderflow;
        return orbit;
      }
      continue;
    }

    if (err_norm <= 1.0) {
      OdeStep<N> s;
      s.t0 = t;
      s.t1 = t + h;
      s.y0 = y;
      s.y1 = y_new;
      s.f0 = k1;
      s.f1 = k7;
      orbit.steps.push_back(s);
      t += h;
      y = y_new;
      k1 = k7;  // FSAL
      if (observer(orbit.steps.back()) == ObserverAction::Stop) {
        orbit.status = OdeStatus::StoppedByObserver;
        return orbit;
      }
    }

    const double factor =
        err_norm == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
    h *= factor;
    if (std::abs(h) < opt.h_min) {
      orbit.status = OdeStatus::StepUnderflow;
      return orbit;
    }
  }
  orbit.status = OdeStatus::MaxSteps;
  return orbit;
}

template <int N, class Field>
DenseOrbit<N> integrate_ode(Field&& field, StateN<N> y0, double t0, double t1,
                            const OdeOptions& opt) {
  return integrate_ode<N>(std::forward<Field>(field), y0, t0, t1, opt,
                          [](const OdeStep<N>&) { return ObserverAction::Continue; });
}

// Locates a sign change of `fn` along one dense step by bisection on the
// interpolant; returns the parameter t with |fn| at or below `tol` (or the
// best bracket midpoint at machine resolution).
template <int N, class Fn>
double bisect_on_step(const OdeStep<N>& step, Fn&& fn, double va, double vb, double tol) {
  double ta = step.t0, tb = step.t1;
  (void)vb;
  for (int it = 0; it < 200; ++it) {
    const double tm = 0.5 * (ta + tb);
    const double vm = fn(step.interp(tm));
    if (std::abs(vm) <= tol || tm == ta || tm == tb) return tm;
    if ((va < 0.0) != (vm < 0.0)) {
      tb = tm;
    } else {
      ta = tm;
      va = vm;
    }
  }
  return 0.5 * (ta + tb);
}

}  // namespace dae
