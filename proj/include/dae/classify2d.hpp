// Pointwise classification, point enumeration, singularity-curve tracing,
// and sector decompositions for the planar system
//   g * dx/dt = f1,   dy/dt = f2.
//
// Rescaling time by d(tau) = dt / g gives the smooth field (f1, f2*g) whose
// flow matches the original on Sigma+ = {g > 0} and runs backward on
// Sigma- = {g < 0}.  Linearizations:
//   equilibrium (f1 = f2 = 0, g != 0):  A_EQ  = [[f1x, f1y], [g*f2x, g*f2y]]
//   singular equilibrium (f1 = g = 0):  A_sEQ = [[f1x, f1y], [gx*f2, gy*f2]]
// Original-system stability is side-aware: attracting iff (on Sigma+ and
// eigenvalues in the left half-plane) or (on Sigma- and in the right).
#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "dae/kernels.hpp"
#include "dae/linalg.hpp"
#include "dae/system.hpp"

namespace dae::d2 {

enum class Side { SigmaPlus, SigmaMinus };

enum class EqKind { Saddle, Node, Focus };
enum class SEqKind { FoldedSaddle, FoldedNode, FoldedFocus };

// Bifurcation / degeneracy codes used across scan results and degenerate
// point reports.  Geometric: T1 (hyperbolic tangency of Sigma branches),
// T2 (elliptic: Sigma loop creation).  Local: L1 saddle-node, L2 singular
// saddle-node of first kind, L3 singularity-crossing equilibrium (f1 = f2 =
// g = 0), L4 cubic fold, L5 equilibrium-fold collision, L6 folded node-focus
// transition, L7 Hopf, L8 folded Hopf, L9 cycle multiplier crossing one,
// G6 fold-fold connection.  The A-codes are the 1D family events.
enum class BifCode {
  T1, T2, L1, L2, L3, L4, L5, L6, L7, L8, L9, G6FoldFold, A11, A21, A300,
};

const char* code_name(BifCode code);

struct RegularPoint2D {};

struct Equilibrium {
  std::complex<double> lambda1, lambda2;  // ordered by (Re, Im)
  EqKind kind = EqKind::Node;
  Side side = Side::SigmaPlus;
  bool desing_stable = false;  // eigenvalues in the left half-plane
  bool stable = false;         // side-aware stability in the original system
};

struct SingularEquilibrium2D {
  std::complex<double> lambda1, lambda2;  // eigenvalues of A_sEQ
  SEqKind kind = SEqKind::FoldedSaddle;
  bool simple = true;
};

struct Fold {
  // Side the parabolic Sigma arc is convex toward (bulges into): SigmaPlus
  // iff g_xx * g_y > 0.
  Side convexity = Side::SigmaPlus;
  bool simple = true;
};

// A point satisfying the defining equations of some class but failing one of
// its non-degeneracy inequalities: a codimension-one (or higher) candidate.
struct DegeneratePoint {
  BifCode candidate = BifCode::L1;
  std::string reason;
};

using Point2DClass =
    std::variant<RegularPoint2D, Equilibrium, SingularEquilibrium2D, Fold, DegeneratePoint>;

const char* class_name(const Point2DClass& cls);

Point2DClass classify_point_2d(const System2D& sys, Vec2 p, double alpha, const Tol& tol = {});

struct SpecialPoint2D {
  Vec2 p;
  Point2DClass cls;
};

struct FindResult2D {
  std::vector<SpecialPoint2D> points;  // sorted by (x, y)
  std::vector<std::string> warnings;
};

// Damped Newton from a grid of seeds on each defining system (f1 = f2 = 0;
// f1 = g = 0; g = g_x = 0), deduplicated, then classified.  Roots of
// different defining systems closer than 10*tol merge into one point; roots
// of the same system that close are kept and flagged.
FindResult2D find_points_2d(const System2D& sys, double alpha, const BBox& box, int grid_n = 32,
                            const Tol& tol = {}, Exec exec = Exec::Parallel);

enum class ArcLabel { Incoming, Outgoing, None };
enum class SigmaMarkKind { Fold, SingularEquilibrium };

struct SigmaVertex {
  Vec2 p;
  ArcLabel label = ArcLabel::None;  // sign of f1*g_x: > 0 outgoing, < 0 incoming
};

struct SigmaMark {
  int vertex = 0;  // index into the branch polyline
  SigmaMarkKind kind = SigmaMarkKind::Fold;
};

struct SigmaBranch {
  std::vector<SigmaVertex> pts;
  std::vector<SigmaMark> marks;
  bool closed = false;
  bool truncated = false;  // continuation stalled (e.g. grad g -> 0)
};

struct SigmaCurve {
  std::vector<SigmaBranch> branches;
  std::vector<std::string> warnings;
};

// Predictor-corrector continuation of {g = 0} inside the box with
// curvature-adaptive steps; vertices satisfy |g| <= 1e-10.  Fold vertices
// (g_x = 0) and singular-equilibrium vertices (f1 = 0) are localized and
// inserted exactly, so arc labels change only at marked vertices.
SigmaCurve trace_sigma(const System2D& sys, double alpha, const BBox& box, double arc_step = 0.0,
                       const Tol& tol = {});

enum class SectorLabel { Incoming, Stable, Outgoing, Unstable, Saddle };

const char* sector_label_name(SectorLabel label);

struct SectorRay {
  Vec2 dir;  // unit
  enum class Kind { SigmaTangent, EigenLeading, EigenNonLeading, EigenStable, EigenUnstable } kind;
};

struct Sector {
  SectorLabel label = SectorLabel::Incoming;
  SectorRay from, to;  // counterclockwise span
};

// Local sector structure at a simple folded node or folded saddle; a folded
// focus has no sector decomposition (every nearby orbit reaches Sigma).
struct SectorDecomposition {
  Vec2 center;
  bool has_sectors = false;
  std::complex<double> lambda1, lambda2;
  std::vector<Sector> sectors;       // counterclockwise circular order
  double transversality_margin = 0.0;  // min |det[eigvec, sigma_tangent]|
  std::string note;
};

SectorDecomposition sector_decomposition(const System2D& sys, Vec2 p, double alpha,
                                         const Tol& tol = {});

}  // namespace dae::d2
