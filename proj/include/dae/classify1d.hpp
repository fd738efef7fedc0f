// Pointwise classification, enumeration, normal forms, and simulation for
// the 1D equation  g(x, alpha) * dx/dt = f(x, alpha).
//
// At a point:  f = 0, g != 0  ->  equilibrium  (simple when f_x != 0;
// eigenvalue lambda = f_x / g, stable iff lambda < 0).
// g = 0, f != 0  ->  singularity  (simple when g_x != 0; lambda = g_x / f,
// outgoing iff lambda > 0: solutions depart from the singular point with
// both time arrows; incoming iff lambda < 0: solutions arrive in finite time).
// f = g = 0  ->  singular equilibrium.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dae/linalg.hpp"
#include "dae/ode.hpp"
#include "dae/system.hpp"

namespace dae::d1 {

struct RegularPoint {};

struct SimpleEquilibrium {
  double lambda = 0.0;  // f_x / g
  bool stable = false;
};

struct SimpleSingularity {
  double lambda = 0.0;  // g_x / f
  bool outgoing = false;
};

// f and its first m x-derivatives vanish, the (m+1)-st does not (m >= 1).
// s = sign(f^(m+1) / g).  `capped` marks degeneracy beyond the stored jet
// order (reported as m >= 3).
struct NonSimpleEquilibrium {
  int m = 1;
  int s = 0;
  bool capped = false;
};

// Mirror image for g: n >= 1 vanishing derivatives, s = sign(g^(n+1) / f).
struct NonSimpleSingularity {
  int n = 1;
  int s = 0;
  bool capped = false;
};

struct SingularEquilibrium {
  int m = 0;  // vanishing x-derivatives of f beyond the value
  int n = 0;  // same for g
  bool capped = false;
};

using Point1DClass = std::variant<RegularPoint, SimpleEquilibrium, SimpleSingularity,
                                  NonSimpleEquilibrium, NonSimpleSingularity, SingularEquilibrium>;

Point1DClass classify_point_1d(const System1D& sys, double x, double alpha, const Tol& tol = {});

const char* class_name(const Point1DClass& cls);
bool is_simple(const Point1DClass& cls);

struct SpecialPoint1D {
  double x = 0.0;
  Point1DClass cls;
};

struct FindResult1D {
  std::vector<SpecialPoint1D> points;  // ascending in x
  std::vector<std::string> warnings;
};

// Locates all roots of f and of g in the interval by grid bracketing
// (including tangential double roots, caught via |f| minima) followed by
// bisection-secured Newton refinement to residuals <= tol.newton.
// A root of f and a root of g closer than 10*tol merge into one
// SingularEquilibrium; two roots of the same function that close are kept
// separate and flagged as a root cluster.
FindResult1D find_special_points_1d(const System1D& sys, double alpha, Interval range,
                                    int grid_n = 512, const Tol& tol = {});

enum class NFCase { A11, A21, A300 };

// Leading data of the reduced bifurcation equation at a codimension-one
// point.  For A1.1 / A2.1 the unfolding parameter is beta(alpha) with
// beta(0) = 0; the pair of equilibria (A1.1) or singularities (A2.1) exists
// where s*beta < 0, at positions x ~ shift +- |a|^(-1/3) * sqrt(-s*beta)
// with a the scaled second derivative.  For A3.0,0, beta = (A/f_x^2) alpha
// and the singularity switches incoming -> outgoing as beta crosses 0.
struct NormalForm1D {
  NFCase nf_case = NFCase::A11;
  int s = 0;
  double dbeta_dalpha = 0.0;
  double A = 0.0;            // A3 only: g_x f_alpha - f_x g_alpha
  bool degenerate = false;   // transversality failed: codimension >= 2 in family
  std::string note;
};

NormalForm1D normal_form_A11(const System1D& sys, double x, double alpha, const Tol& tol = {});
NormalForm1D normal_form_A21(const System1D& sys, double x, double alpha, const Tol& tol = {});
NormalForm1D normal_form_A300(const System1D& sys, double x, double alpha, const Tol& tol = {});

struct Perturbation1D {
  SystemDef sys;
  std::vector<std::string> warnings;
};

// Builds the polynomial system realizing a prescribed local pattern near a
// degenerate point: f = P(x) = prod (x - x_i)^(a_i) (cases A1, A3) and/or
// g = Q(x) = prod (x - y_j)^(b_j) (cases A2, A3); the omitted side is 1.
// Preconditions: coordinates strictly increasing; sum(a) <= m+1 and
// sum(b) <= n+1.  Multiplicity sums whose parity cannot arise from a small
// perturbation of the degree-(m+1) (resp. (n+1)) normal form are accepted
// but flagged with a parity warning.
Perturbation1D construct_unfolding_perturbation(NFCase nf_case, int m, int n,
                                                const std::vector<int>& mult_a,
                                                const std::vector<int>& mult_b,
                                                const std::vector<double>& coords_x,
                                                const std::vector<double>& coords_y);

struct Stability1D {
  bool stable = false;
  std::vector<SpecialPoint1D> violations;
  std::vector<std::string> notes;
};

// Structurally stable on [a,b] iff every special point is a simple
// equilibrium or simple singularity and none sits within tol of a boundary.
Stability1D structural_stability_1d(const System1D& sys, double alpha, Interval range,
                                    int grid_n = 512, const Tol& tol = {});

enum class SimEvent1D { TimeOut, ReachedSingularity, ReachedEquilibrium, LeftDomain };

struct SimOptions1D {
  double g_stop = 1e-9;       // singularity arrival threshold on |g|
  double speed_stop = 1e-7;   // equilibrium arrival threshold on |f/g|
  Interval domain{-1e6, 1e6};
  OdeOptions ode;
};

struct Orbit1D {
  std::vector<std::pair<double, double>> samples;  // (t, x)
  SimEvent1D event = SimEvent1D::TimeOut;
  double t_end = 0.0;
  double x_end = 0.0;
  // ReachedSingularity: refined singular point x* and arrival time t*
  // (integration to |g| = g_stop plus the quadrature of dt = g/f dx over
  // the remaining gap, so t* converges as g_stop shrinks; if the adaptive
  // step collapses before |g| reaches g_stop, the quadrature takes over
  // from the stall point instead).
  double x_star = 0.0;
  double t_star = 0.0;
};

// Integrates dx/dt = f/g from x0.  Throws std::domain_error if x0 lies on
// the singular set (|g| <= g_stop).
Orbit1D simulate_1d(const System1D& sys, double x0, double alpha, double t_max,
                    const SimOptions1D& opt = {});

}  // namespace dae::d1
