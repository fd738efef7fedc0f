// Immutable expression trees over the variables x, y, alpha with exact
// symbolic differentiation.  Construction folds constants (and the trivial
// identities 0+e, 1*e, e^0, ...) but performs no further simplification.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dae {

enum class Var : int { X = 0, Y = 1, Alpha = 2 };

enum class UnaryFn : int { Sin, Cos, Exp, Log, Tanh, Sqrt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

class Expr {
 public:
  Expr();  // the constant 0
  static Expr constant(double v);
  static Expr variable(Var v);
  static Expr pow(const Expr& base, int exponent);  // exponent >= 0
  static Expr apply(UnaryFn fn, const Expr& arg);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  // IEEE semantics: out-of-domain arguments propagate NaN/inf rather than
  // throwing, so root finders can probe freely.
  double eval(double x, double y, double alpha) const noexcept;

  Expr derivative(Var v) const;
  bool depends_on(Var v) const;
  bool is_constant(double v) const;

  // Parseable text form; parse(str()) evaluates identically.
  std::string str() const;

  const ExprNode& node() const { return *node_; }

 private:
  explicit Expr(ExprPtr n) : node_(std::move(n)) {}
  ExprPtr node_;
};

struct ExprNode {
  enum class Kind { Const, Variable, Neg, Add, Sub, Mul, Div, Pow, Fn };
  Kind kind = Kind::Const;
  double value = 0.0;   // Const
  Var var = Var::X;     // Variable
  int exponent = 0;     // Pow
  UnaryFn fn{};         // Fn
  ExprPtr a, b;         // operands
};

// Syntax or lexical error; `offset` is the byte offset into the source text
// and `expected` names what the parser was looking for.
struct ParseError : std::runtime_error {
  std::size_t offset;
  std::string expected;
  ParseError(const std::string& msg, std::size_t off, std::string exp)
      : std::runtime_error(msg), offset(off), expected(std::move(exp)) {}
};

// Grammar (whitespace insignificant, '#' starts a line comment):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := number | 'x' | 'y' | 'alpha' | fn '(' expr ')' | '(' expr ')' | '-' factor
//   fn     := sin | cos | exp | log | tanh | sqrt
Expr parse_expression(std::string_view source);

const char* fn_name(UnaryFn fn);
const char* var_name(Var v);

}  // namespace dae
