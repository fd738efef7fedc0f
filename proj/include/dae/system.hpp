// System definitions for the quasilinear equations under study:
//   1D:  g(x, alpha) * dx/dt = f(x, alpha)
//   2D:  g(x, y, alpha) * dx/dt = f1(x, y, alpha),  dy/dt = f2(x, y, alpha)
// The singular set is  Sigma = {g = 0};  Sigma+ / Sigma- are {g > 0} / {g < 0}.
#pragma once

#include <cmath>
#include <string>

#include "dae/jet.hpp"

namespace dae {

struct SystemDef {
  int dim = 1;  // 1 or 2
  std::string name;
  Expr f;        // dim == 1
  Expr f1, f2;   // dim == 2
  Expr g;
};

// Validate variable usage (1D systems may not mention y) and wrap.
SystemDef make_system_1d(Expr f, Expr g, std::string name = "");
SystemDef make_system_2d(Expr f1, Expr f2, Expr g, std::string name = "");

// Jet-augmented views used by the analysis code.
struct System1D {
  JetExpr f, g;
  explicit System1D(const SystemDef& def);
};

struct System2D {
  JetExpr f1, f2, g;
  explicit System2D(const SystemDef& def);
};

// Tolerance bundle.  `residual` is the zero threshold for function values
// (refined roots are driven well below it); `deriv` guards sign decisions on
// derivative quantities; `genericity` is the non-degeneracy threshold with a
// warning band above it.
struct Tol {
  double residual = 1e-9;
  double deriv = 1e-7;
  double newton = 1e-12;
  double genericity = 1e-7;
  double genericity_warn = 1e-5;

  double merge_radius() const { return 10.0 * residual; }

  static Tol from_residual(double r) {
    Tol t;
    t.residual = r;
    t.deriv = 100.0 * r;
    return t;
  }
};

}  // namespace dae
