#include "dae/system.hpp"

#include <stdexcept>

namespace dae {

SystemDef make_system_1d(Expr f, Expr g, std::string name) {
  if (f.depends_on(Var::Y) || g.depends_on(Var::Y))
    throw std::invalid_argument("1D system must not reference the variable y");
  SystemDef def;
  def.dim = 1;
  def.name = std::move(name);
  def.f = f;
  def.g = g;
  return def;
}

SystemDef make_system_2d(Expr f1, Expr f2, Expr g, std::string name) {
  SystemDef def;
  def.dim = 2;
  def.name = std::move(name);
  def.f1 = f1;
  def.f2 = f2;
  def.g = g;
  return def;
}

System1D::System1D(const SystemDef& def) : f(def.f), g(def.g) {
  if (def.dim != 1) throw std::invalid_argument("System1D requires a 1D system");
}

System2D::System2D(const SystemDef& def) : f1(def.f1), f2(def.f2), g(def.g) {
  if (def.dim != 2) throw std::invalid_argument("System2D requires a 2D system");
}

}  // namespace dae
