#include "dae/jet.hpp"

#include <cmath>

namespace dae {

namespace {

// Multi-indices (ix, iy, ia) with ix+iy+ia <= 3 in a fixed enumeration order.
constexpr int kIdx[JetExpr::kCount][3] = {
    {0, 0, 0},                                                         // value
    {1, 0, 0}, {0, 1, 0}, {0, 0, 1},                                   // order 1
    {2, 0, 0}, {1, 1, 0}, {0, 2, 0}, {1, 0, 1}, {0, 1, 1}, {0, 0, 2},  // order 2
    {3, 0, 0}, {2, 1, 0}, {1, 2, 0}, {0, 3, 0},                        // order 3
    {2, 0, 1}, {1, 1, 1}, {0, 2, 1}, {1, 0, 2}, {0, 1, 2}, {0, 0, 3},
};

}  // namespace

int JetExpr::index(int ix, int iy, int ia) {
  for (int i = 0; i < kCount; ++i)
    if (kIdx[i][0] == ix && kIdx[i][1] == iy && kIdx[i][2] == ia) return i;
  throw std::invalid_argument("JetExpr::index: order above 3");
}

JetExpr::JetExpr(const Expr& e) {
  d_[0] = e;
  // Derive each entry from a lower-order one along a canonical axis.
  for (int i = 1; i < kCount; ++i) {
    const int ix = kIdx[i][0], iy = kIdx[i][1], ia = kIdx[i][2];
    if (ix > 0)
      d_[i] = d_[index(ix - 1, iy, ia)].derivative(Var::X);
    else if (iy > 0)
      d_[i] = d_[index(ix, iy - 1, ia)].derivative(Var::Y);
    else
      d_[i] = d_[index(ix, iy, ia - 1)].derivative(Var::Alpha);
  }
}

std::array<double, 3> JetExpr::gradient(double x, double y, double alpha) const noexcept {
  return {d_[1].eval(x, y, alpha), d_[2].eval(x, y, alpha), d_[3].eval(x, y, alpha)};
}

Jet3 JetExpr::jet_unchecked(double x, double y, double alpha) const noexcept {
  Jet3 j;
  double* slots[kCount] = {&j.v,   &j.x,   &j.y,   &j.a,   &j.xx,  &j.xy,  &j.yy,
                           &j.xa,  &j.ya,  &j.aa,  &j.xxx, &j.xxy, &j.xyy, &j.yyy,
                           &j.xxa, &j.xya, &j.yya, &j.xaa, &j.yaa, &j.aaa};
  for (int i = 0; i < kCount; ++i) *slots[i] = d_[i].eval(x, y, alpha);
  return j;
}

Jet3 JetExpr::jet(double x, double y, double alpha) const {
  Jet3 j = jet_unchecked(x, y, alpha);
  const double probe[kCount] = {j.v,   j.x,   j.y,   j.a,   j.xx,  j.xy,  j.yy,
                                j.xa,  j.ya,  j.aa,  j.xxx, j.xxy, j.xyy, j.yyy,
                                j.xxa, j.xya, j.yya, j.xaa, j.yaa, j.aaa};
  for (double v : probe)
    if (!std::isfinite(v))
      throw EvalDomainError("expression jet is not finite at the evaluation point");
  return j;
}

double Jet3::get(int ix, int iy, int ia) const {
  const Jet3& j = *this;
  const double slots[JetExpr::kCount] = {j.v,   j.x,   j.y,   j.a,   j.xx,  j.xy,  j.yy,
                                         j.xa,  j.ya,  j.aa,  j.xxx, j.xxy, j.xyy, j.yyy,
                                         j.xxa, j.xya, j.yya, j.xaa, j.yaa, j.aaa};
  return slots[JetExpr::index(ix, iy, ia)];
}

}  // namespace dae
