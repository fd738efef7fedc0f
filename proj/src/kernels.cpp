#include "dae/kernels.hpp"

#include <cmath>

namespace dae {

namespace {

template <int N>
double max_norm(const std::array<double, N>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

template <int N>
bool solve_linear(const std::array<double, N * N>& j, const std::array<double, N>& r,
                  std::array<double, N>& dx) {
  if constexpr (N == 2) {
    Mat2 m{j[0], j[1], j[2], j[3]};
    Vec2 out;
    if (!solve(m, Vec2{r[0], r[1]}, out)) return false;
    dx = {out.x, out.y};
    return true;
  } else {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.m[i] = j[i];
    Vec3 out;
    if (!solve(m, Vec3{r[0], r[1], r[2]}, out)) return false;
    dx = {out.x, out.y, out.z};
    return true;
  }
}

}  // namespace

template <int N>
NewtonOutcome<N> damped_newton(
    const std::function<std::array<double, N>(const std::array<double, N>&)>& F,
    const std::function<std::array<double, N * N>(const std::array<double, N>&)>& J,
    std::array<double, N> x0, const NewtonOptions& opt) {
  NewtonOutcome<N> out;
  out.x = x0;
  std::array<double, N> fx = F(out.x);
  double fn = max_norm<N>(fx);
  if (!std::isfinite(fn)) return out;

  for (int it = 0; it < opt.max_iter; ++it) {
    out.iters = it;
    if (fn <= opt.f_tol) {
      out.converged = true;
      out.residual = fn;
      return out;
    }
    std::array<double, N> dx;
    if (!solve_linear<N>(J(out.x), fx, dx)) break;
    bool finite = true;
    for (double e : dx) finite = finite && std::isfinite(e);
    if (!finite) break;

    // Backtracking line search on the residual norm.  The deep halving limit
    // matters on plateaued residuals (e.g. saturated sigmoids), where the
    // first accepted step can need lambda ~ 1e-9 of a huge Newton step.
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 48; ++bt) {
      std::array<double, N> xn;
      for (int i = 0; i < N; ++i) xn[i] = out.x[i] - lambda * dx[i];
      const std::array<double, N> fxn = F(xn);
      const double fnn = max_norm<N>(fxn);
      if (std::isfinite(fnn) && (fnn < fn || fnn <= opt.f_tol)) {
        out.x = xn;
        fx = fxn;
        fn = fnn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    if (lambda * max_norm<N>(dx) < opt.step_tol && fn > opt.f_tol) break;
  }
  out.residual = fn;
  out.converged = fn <= opt.f_tol;
  return out;
}

template <int N>
std::vector<NewtonOutcome<N>> multistart_newton(
    const std::function<std::array<double, N>(const std::array<double, N>&)>& F,
    const std::function<std::array<double, N * N>(const std::array<double, N>&)>& J,
    const std::vector<std::array<double, N>>& seeds, const NewtonOptions& opt, Exec exec) {
  std::vector<NewtonOutcome<N>> results(seeds.size());
  const long n = static_cast<long>(seeds.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i) results[i] = damped_newton<N>(F, J, seeds[i], opt);
  } else {
    for (long i = 0; i < n; ++i) results[i] = damped_newton<N>(F, J, seeds[i], opt);
  }
  return results;
}

std::vector<double> grid_eval(const std::function<double(double, double)>& fn, const BBox& box,
                              int nx, int ny, Exec exec) {
  std::vector<double> values(static_cast<std::size_t>(nx) * ny);
  const double dx = nx > 1 ? (box.x1 - box.x0) / (nx - 1) : 0.0;
  const double dy = ny > 1 ? (box.y1 - box.y0) / (ny - 1) : 0.0;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < ny; ++j)
      for (long i = 0; i < nx; ++i)
        values[j * nx + i] = fn(box.x0 + i * dx, box.y0 + j * dy);
  } else {
    for (long j = 0; j < ny; ++j)
      for (long i = 0; i < nx; ++i)
        values[j * nx + i] = fn(box.x0 + i * dx, box.y0 + j * dy);
  }
  return values;
}

template NewtonOutcome<2> damped_newton<2>(
    const std::function<std::array<double, 2>(const std::array<double, 2>&)>&,
    const std::function<std::array<double, 4>(const std::array<double, 2>&)>&,
    std::array<double, 2>, const NewtonOptions&);
template NewtonOutcome<3> damped_newton<3>(
    const std::function<std::array<double, 3>(const std::array<double, 3>&)>&,
    const std::function<std::array<double, 9>(const std::array<double, 3>&)>&,
    std::array<double, 3>, const NewtonOptions&);
template std::vector<NewtonOutcome<2>> multistart_newton<2>(
    const std::function<std::array<double, 2>(const std::array<double, 2>&)>&,
    const std::function<std::array<double, 4>(const std::array<double, 2>&)>&,
    const std::vector<std::array<double, 2>>&, const NewtonOptions&, Exec);
template std::vector<NewtonOutcome<3>> multistart_newton<3>(
    const std::function<std::array<double, 3>(const std::array<double, 3>&)>&,
    const std::function<std::array<double, 9>(const std::array<double, 3>&)>&,
    const std::vector<std::array<double, 3>>&, const NewtonOptions&, Exec);

}  // namespace dae
