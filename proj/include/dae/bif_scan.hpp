// One-parameter sweeps locating every codimension-one transition of the
// phase portrait:
//
//   T1/T2  critical point of g on the singular set (branch crossing / oval)
//   L1     zero eigenvalue at an equilibrium (saddle-node style collision)
//   L2     zero eigenvalue at a singular equilibrium (folded saddle <-> node)
//   L3     equilibrium crosses the singular set
//   L4     degenerate fold (cubic tangency): a fold pair is born or dies
//   L5     singular equilibrium crosses a fold
//   L6     folded node <-> folded focus (discriminant zero)
//   L7     imaginary eigenvalue pair at an equilibrium (cycle birth)
//   L8     imaginary pair at a singular equilibrium (folded-cycle birth)
//   L9     periodic orbit with unit multiplier (cycle fold)
//   G6     heteroclinic connection between two folds
//
// Except for L9 and G6, each transition is the regular zero set of a system
// of three defining equations in (x, y, alpha); candidates come from
// multistart Newton on those systems, exact first derivatives included.
// L9 and G6 are located by sweeping alpha and bisecting scalar measures
// (multiplier minus one, signed connection clearance).
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dae/classify1d.hpp"
#include "dae/classify2d.hpp"
#include "dae/kernels.hpp"
#include "dae/system.hpp"

namespace dae::scan {

// Transversality determinants used by the unfolding predictions.
struct DeltaSet {
  double d1 = 0.0;  // det d(f1,f2)/d(x,y)
  double d2 = 0.0;  // det d(f1,g)/d(x,y)
  double d3 = 0.0;  // det d(g,g_x)/d(y,alpha)
  double d4 = 0.0;  // det d(f1,f2,g)/d(x,y,alpha)
  double d5 = 0.0;  // det d(f1,g,g_x)/d(x,y,alpha)
};
DeltaSet compute_deltas(const System2D& sys, Vec2 p, double alpha);

// Scalar diagnostics at a point, as (name, value) pairs: the defining
// functions, both linearization invariants, and the determinants above.
std::vector<std::pair<std::string, double>> test_functions(const System2D& sys, Vec2 p,
                                                           double alpha);

struct BifEvent {
  d2::BifCode code;
  double alpha = 0.0;
  Vec2 p{};  // event location; y = 0 for events of a 1D system
  double genericity = 0.0;       // smallest transversality magnitude backing the event
  bool genericity_warning = false;
  std::vector<std::pair<std::string, double>> test_values;
  std::string unfolding;             // predicted portraits on either side of alpha
  std::vector<std::string> notes;
};

struct ScanResult {
  std::vector<BifEvent> events;  // sorted by (alpha, code, x, y)
  std::vector<std::string> warnings;
};

struct ScanOptions {
  int grid_n = 16;         // Newton seeds per spatial axis (alpha gets grid_n/2)
  int alpha_samples = 33;  // sweep resolution for the L9 / G6 trackers
  bool cycles = true;      // enable limit-cycle hunting (L9, L7/L8 confirmation)
  bool connections = true; // enable fold-connection tracking (G6)
  Tol tol{};
  Exec exec = Exec::Parallel;
};

ScanResult scan_parameter(const System2D& sys, Interval alpha_range, const BBox& box,
                          const ScanOptions& opt = {});

struct Scan1DOptions {
  int grid_n = 64;
  Tol tol{};
};

// 1D sweep: equilibrium folds (A1.1), singularity folds (A2.1) and
// equilibrium/singularity collisions (A3.0,0).
ScanResult scan_parameter_1d(const System1D& sys, Interval alpha_range, Interval x_range,
                             const Scan1DOptions& opt = {});

// Quantitative unfolding data for the transitions with closed-form
// predictions: branch tangents d(x,y)/d(alpha) and existence sides.
struct UnfoldingPrediction {
  std::vector<std::pair<std::string, std::array<double, 2>>> branch_tangents;
  std::string narrative;
  std::vector<std::string> notes;
};
UnfoldingPrediction predict_unfolding_L3(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol = {});
UnfoldingPrediction predict_unfolding_L4(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol = {});
UnfoldingPrediction predict_unfolding_L5(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol = {});

// Fold-to-fold connection test at fixed alpha.  Shoots the companion orbit
// through one fold and reports the signed normal clearance g/|grad g| at the
// closest approach to the other; the sign says on which side of the singular
// set the orbit passes, and a zero crossing in alpha is a G6 event.
struct FoldConnection {
  bool applicable = false;  // exactly two simple folds, orbit passes near the target
  Vec2 fold_a{}, fold_b{};
  double clearance = 0.0;
  double miss_distance = 0.0;  // Euclidean closest approach to fold_b
  bool connected = false;
};
FoldConnection detect_fold_connection(const System2D& sys, double alpha, const BBox& box,
                                      const Tol& tol = {});

}  // namespace dae::scan
