// Timing comparison of the serial reference kernels against their OpenMP
// variants on workloads shaped like a real scan: multistart Newton on the
// defining systems of a nontrivial 2D model, and dense grid sampling of g.
// Both variants fill one result slot per input, so agreement is checked
// bit-for-bit before any timing is reported.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dae/expr.hpp"
#include "dae/kernels.hpp"
#include "dae/system.hpp"

using namespace dae;

namespace {

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s %10.1f ms %10.1f ms %7.2fx   %s\n", name, serial_s * 1e3, parallel_s * 1e3,
              serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int scale = 1;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--large") == 0) scale = 4;
  }

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled in this build; both columns run the serial path\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  // A system with many coexisting roots so the Newton work per seed varies.
  const System2D sys(make_system_2d(
      parse_expression("y - x + 0.3*sin(3*x) + 0.05"), parse_expression("x + y^3 - 0.4*y"),
      parse_expression("x^2 + y^2 - 1 + 0.2*cos(5*x)"), "bench"));

  // --- multistart Newton on (f1, f2) ------------------------------------
  {
    const std::function<std::array<double, 2>(const std::array<double, 2>&)> F =
        [&sys](const std::array<double, 2>& v) {
          return std::array<double, 2>{sys.f1.value(v[0], v[1], 0.0),
                                       sys.f2.value(v[0], v[1], 0.0)};
        };
    const std::function<std::array<double, 4>(const std::array<double, 2>&)> J =
        [&sys](const std::array<double, 2>& v) {
          const Jet3 a = sys.f1.jet_unchecked(v[0], v[1], 0.0);
          const Jet3 b = sys.f2.jet_unchecked(v[0], v[1], 0.0);
          return std::array<double, 4>{a.x, a.y, b.x, b.y};
        };
    const int n = 160 * scale;
    std::vector<std::array<double, 2>> seeds;
    seeds.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        seeds.push_back({-2.0 + 4.0 * i / (n - 1), -2.0 + 4.0 * j / (n - 1)});

    std::vector<NewtonOutcome<2>> serial, parallel;
    const double ts =
        time_best_of(3, [&] { serial = multistart_newton<2>(F, J, seeds, {}, Exec::Serial); });
    const double tp =
        time_best_of(3, [&] { parallel = multistart_newton<2>(F, J, seeds, {}, Exec::Parallel); });
    bool same = serial.size() == parallel.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i)
      same = serial[i].converged == parallel[i].converged && serial[i].x == parallel[i].x &&
             serial[i].residual == parallel[i].residual && serial[i].iters == parallel[i].iters;
    report("multistart_newton<2>", ts, tp, same);
  }

  // --- grid sampling of g ------------------------------------------------
  {
    const auto fn = [&sys](double x, double y) {
      const Jet3 j = sys.g.jet_unchecked(x, y, 0.0);
      return j.v + 0.1 * j.x + 0.01 * j.yy;  // jet-heavy per-sample work
    };
    const int nx = 1200 * scale, ny = 1200 * scale;
    const BBox box{-2, -2, 2, 2};
    std::vector<double> serial, parallel;
    const double ts = time_best_of(3, [&] { serial = grid_eval(fn, box, nx, ny, Exec::Serial); });
    const double tp =
        time_best_of(3, [&] { parallel = grid_eval(fn, box, nx, ny, Exec::Parallel); });
    report("grid_eval", ts, tp, serial == parallel);
  }

  return 0;
}
