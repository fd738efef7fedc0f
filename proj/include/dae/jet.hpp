// Value and all partial derivatives up to total order 3 of a scalar
// expression in (x, y, alpha), computed by evaluating symbolically
// differentiated trees (no finite differences).
#pragma once

#include <array>
#include <stdexcept>

#include "dae/expr.hpp"

namespace dae {

struct Jet3 {
  double v = 0.0;
  // first order
  double x = 0.0, y = 0.0, a = 0.0;
  // second order
  double xx = 0.0, xy = 0.0, yy = 0.0, xa = 0.0, ya = 0.0, aa = 0.0;
  // third order
  double xxx = 0.0, xxy = 0.0, xyy = 0.0, yyy = 0.0;
  double xxa = 0.0, xya = 0.0, yya = 0.0;
  double xaa = 0.0, yaa = 0.0, aaa = 0.0;

  // Partial with ix derivatives in x, iy in y, ia in alpha (ix+iy+ia <= 3).
  double get(int ix, int iy, int ia) const;
};

struct EvalDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An expression bundled with its 19 partial-derivative trees (each mixed
// partial stored once; symmetry is inherent in symbolic differentiation).
class JetExpr {
 public:
  JetExpr() : JetExpr(Expr()) {}
  explicit JetExpr(const Expr& e);

  const Expr& expr() const { return d_[0]; }
  const Expr& partial(int ix, int iy, int ia) const { return d_[index(ix, iy, ia)]; }

  double value(double x, double y, double alpha) const noexcept {
    return d_[0].eval(x, y, alpha);
  }
  // (d/dx, d/dy, d/dalpha)
  std::array<double, 3> gradient(double x, double y, double alpha) const noexcept;

  // Throws EvalDomainError if any entry is non-finite at the point.
  Jet3 jet(double x, double y, double alpha) const;
  Jet3 jet_unchecked(double x, double y, double alpha) const noexcept;

  static int index(int ix, int iy, int ia);
  static constexpr int kCount = 20;

 private:
  std::array<Expr, kCount> d_;
};

}  // namespace dae
