// Data-parallel numeric kernels: damped multistart Newton sweeps and scalar
// field sampling over a grid.  Each kernel has a plain serial loop (the
// reference) and an OpenMP variant; both fill one result slot per input, so
// the outputs are identical bit-for-bit and independent of thread count.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "dae/linalg.hpp"

namespace dae {

enum class Exec { Serial, Parallel };

struct NewtonOptions {
  int max_iter = 50;
  double f_tol = 1e-12;     // residual target (max-norm)
  double step_tol = 1e-15;  // give up when damped steps stall below this
};

template <int N>
struct NewtonOutcome {
  bool converged = false;
  std::array<double, N> x{};
  double residual = 0.0;
  int iters = 0;
};

// F: array<double,N> -> array<double,N); J: array<double,N> -> row-major
// array<double,N*N>.  Damped (backtracking) Newton from one seed.
template <int N>
NewtonOutcome<N> damped_newton(
    const std::function<std::array<double, N>(const std::array<double, N>&)>& F,
    const std::function<std::array<double, N * N>(const std::array<double, N>&)>& J,
    std::array<double, N> x0, const NewtonOptions& opt = {});

template <int N>
std::vector<NewtonOutcome<N>> multistart_newton(
    const std::function<std::array<double, N>(const std::array<double, N>&)>& F,
    const std::function<std::array<double, N * N>(const std::array<double, N>&)>& J,
    const std::vector<std::array<double, N>>& seeds, const NewtonOptions& opt = {},
    Exec exec = Exec::Parallel);

// Samples fn over an nx-by-ny grid of cell-corner points spanning the box;
// row-major with x varying fastest.
std::vector<double> grid_eval(const std::function<double(double, double)>& fn, const BBox& box,
                              int nx, int ny, Exec exec = Exec::Parallel);

extern template NewtonOutcome<2> damped_newton<2>(
    const std::function<std::array<double, 2>(const std::array<double, 2>&)>&,
    const std::function<std::array<double, 4>(const std::array<double, 2>&)>&,
    std::array<double, 2>, const NewtonOptions&);
extern template NewtonOutcome<3> damped_newton<3>(
    const std::function<std::array<double, 3>(const std::array<double, 3>&)>&,
    const std::function<std::array<double, 9>(const std::array<double, 3>&)>&,
    std::array<double, 3>, const NewtonOptions&);
extern template std::vector<NewtonOutcome<2>> multistart_newton<2>(
    const std::function<std::array<double, 2>(const std::array<double, 2>&)>&,
    const std::function<std::array<double, 4>(const std::array<double, 2>&)>&,
    const std::vector<std::array<double, 2>>&, const NewtonOptions&, Exec);
extern template std::vector<NewtonOutcome<3>> multistart_newton<3>(
    const std::function<std::array<double, 3>(const std::array<double, 3>&)>&,
    const std::function<std::array<double, 9>(const std::array<double, 3>&)>&,
    const std::vector<std::array<double, 3>>&, const NewtonOptions&, Exec);

}  // namespace dae
