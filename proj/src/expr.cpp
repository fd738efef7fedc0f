#include "dae/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace dae {

namespace {

ExprPtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr const_node(double v) {
  ExprNode n;
  n.kind = ExprNode::Kind::Const;
  n.value = v;
  return make_node(std::move(n));
}

bool is_const(const ExprPtr& p, double v) {
  return p->kind == ExprNode::Kind::Const && p->value == v;
}

double ipow(double base, int e) {
  double r = 1.0;
  double b = base;
  for (int k = e; k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

double apply_fn(UnaryFn fn, double v) {
  switch (fn) {
    case UnaryFn::Sin: return std::sin(v);
    case UnaryFn::Cos: return std::cos(v);
    case UnaryFn::Exp: return std::exp(v);
    case UnaryFn::Log: return std::log(v);
    case UnaryFn::Tanh: return std::tanh(v);
    case UnaryFn::Sqrt: return std::sqrt(v);
  }
  return 0.0;
}

}  // namespace

Expr::Expr() : node_(const_node(0.0)) {}

Expr Expr::constant(double v) { return Expr(const_node(v)); }

Expr Expr::variable(Var v) {
  ExprNode n;
  n.kind = ExprNode::Kind::Variable;
  n.var = v;
  return Expr(make_node(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) {
  const ExprPtr& pa = a.node_;
  const ExprPtr& pb = b.node_;
  if (pa->kind == ExprNode::Kind::Const && pb->kind == ExprNode::Kind::Const)
    return Expr::constant(pa->value + pb->value);
  if (is_const(pa, 0.0)) return b;
  if (is_const(pb, 0.0)) return a;
  ExprNode n;
  n.kind = ExprNode::Kind::Add;
  n.a = pa;
  n.b = pb;
  return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a, const Expr& b) {
  const ExprPtr& pa = a.node_;
  const ExprPtr& pb = b.node_;
  if (pa->kind == ExprNode::Kind::Const && pb->kind == ExprNode::Kind::Const)
    return Expr::constant(pa->value - pb->value);
  if (is_const(pb, 0.0)) return a;
  if (is_const(pa, 0.0)) return -b;
  ExprNode n;
  n.kind = ExprNode::Kind::Sub;
  n.a = pa;
  n.b = pb;
  return Expr(make_node(std::move(n)));
}

Expr operator*(const Expr& a, const Expr& b) {
  const ExprPtr& pa = a.node_;
  const ExprPtr& pb = b.node_;
  if (pa->kind == ExprNode::Kind::Const && pb->kind == ExprNode::Kind::Const)
    return Expr::constant(pa->value * pb->value);
  if (is_const(pa, 0.0) || is_const(pb, 0.0)) return Expr::constant(0.0);
  if (is_const(pa, 1.0)) return b;
  if (is_const(pb, 1.0)) return a;
  ExprNode n;
  n.kind = ExprNode::Kind::Mul;
  n.a = pa;
  n.b = pb;
  return Expr(make_node(std::move(n)));
}

Expr operator/(const Expr& a, const Expr& b) {
  const ExprPtr& pa = a.node_;
  const ExprPtr& pb = b.node_;
  if (pb->kind == ExprNode::Kind::Const && pb->value != 0.0) {
    if (pa->kind == ExprNode::Kind::Const) return Expr::constant(pa->value / pb->value);
    if (pb->value == 1.0) return a;
  }
  if (is_const(pa, 0.0)) return Expr::constant(0.0);
  ExprNode n;
  n.kind = ExprNode::Kind::Div;
  n.a = pa;
  n.b = pb;
  return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a) {
  const ExprPtr& pa = a.node_;
  if (pa->kind == ExprNode::Kind::Const) return Expr::constant(-pa->value);
  if (pa->kind == ExprNode::Kind::Neg) return Expr(pa->a);
  ExprNode n;
  n.kind = ExprNode::Kind::Neg;
  n.a = pa;
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(const Expr& base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("Expr::pow: exponent must be non-negative");
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  const ExprPtr& pb = base.node_;
  if (pb->kind == ExprNode::Kind::Const) return Expr::constant(ipow(pb->value, exponent));
  ExprNode n;
  n.kind = ExprNode::Kind::Pow;
  n.exponent = exponent;
  n.a = pb;
  return Expr(make_node(std::move(n)));
}

Expr Expr::apply(UnaryFn fn, const Expr& arg) {
  const ExprPtr& pa = arg.node_;
  if (pa->kind == ExprNode::Kind::Const) {
    const double v = apply_fn(fn, pa->value);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  ExprNode n;
  n.kind = ExprNode::Kind::Fn;
  n.fn = fn;
  n.a = pa;
  return Expr(make_node(std::move(n)));
}

namespace {

double eval_node(const ExprNode& n, double x, double y, double alpha) noexcept {
  switch (n.kind) {
    case ExprNode::Kind::Const: return n.value;
    case ExprNode::Kind::Variable:
      switch (n.var) {
        case Var::X: return x;
        case Var::Y: return y;
        case Var::Alpha: return alpha;
      }
      return 0.0;
    case ExprNode::Kind::Neg: return -eval_node(*n.a, x, y, alpha);
    case ExprNode::Kind::Add: return eval_node(*n.a, x, y, alpha) + eval_node(*n.b, x, y, alpha);
    case ExprNode::Kind::Sub: return eval_node(*n.a, x, y, alpha) - eval_node(*n.b, x, y, alpha);
    case ExprNode::Kind::Mul: return eval_node(*n.a, x, y, alpha) * eval_node(*n.b, x, y, alpha);
    case ExprNode::Kind::Div: return eval_node(*n.a, x, y, alpha) / eval_node(*n.b, x, y, alpha);
    case ExprNode::Kind::Pow: return ipow(eval_node(*n.a, x, y, alpha), n.exponent);
    case ExprNode::Kind::Fn: return apply_fn(n.fn, eval_node(*n.a, x, y, alpha));
  }
  return 0.0;
}

}  // namespace

double Expr::eval(double x, double y, double alpha) const noexcept {
  return eval_node(*node_, x, y, alpha);
}

Expr Expr::derivative(Var v) const {
  const ExprNode& n = *node_;
  switch (n.kind) {
    case ExprNode::Kind::Const: return Expr::constant(0.0);
    case ExprNode::Kind::Variable: return Expr::constant(n.var == v ? 1.0 : 0.0);
    case ExprNode::Kind::Neg: return -Expr(n.a).derivative(v);
    case ExprNode::Kind::Add: return Expr(n.a).derivative(v) + Expr(n.b).derivative(v);
    case ExprNode::Kind::Sub: return Expr(n.a).derivative(v) - Expr(n.b).derivative(v);
    case ExprNode::Kind::Mul: {
      const Expr a(n.a), b(n.b);
      return a.derivative(v) * b + a * b.derivative(v);
    }
    case ExprNode::Kind::Div: {
      const Expr a(n.a), b(n.b);
      return (a.derivative(v) * b - a * b.derivative(v)) / Expr::pow(b, 2);
    }
    case ExprNode::Kind::Pow: {
      const Expr a(n.a);
      return Expr::constant(static_cast<double>(n.exponent)) * Expr::pow(a, n.exponent - 1) *
             a.derivative(v);
    }
    case ExprNode::Kind::Fn: {
      const Expr a(n.a);
      const Expr da = a.derivative(v);
      switch (n.fn) {
        case UnaryFn::Sin: return Expr::apply(UnaryFn::Cos, a) * da;
        case UnaryFn::Cos: return -(Expr::apply(UnaryFn::Sin, a) * da);
        case UnaryFn::Exp: return Expr::apply(UnaryFn::Exp, a) * da;
        case UnaryFn::Log: return da / a;
        case UnaryFn::Tanh:
          return (Expr::constant(1.0) - Expr::pow(Expr::apply(UnaryFn::Tanh, a), 2)) * da;
        case UnaryFn::Sqrt:
          return da / (Expr::constant(2.0) * Expr::apply(UnaryFn::Sqrt, a));
      }
      return Expr::constant(0.0);
    }
  }
  return Expr::constant(0.0);
}

bool Expr::depends_on(Var v) const {
  const ExprNode& n = *node_;
  switch (n.kind) {
    case ExprNode::Kind::Const: return false;
    case ExprNode::Kind::Variable: return n.var == v;
    case ExprNode::Kind::Neg:
    case ExprNode::Kind::Pow:
    case ExprNode::Kind::Fn: return Expr(n.a).depends_on(v);
    default: return Expr(n.a).depends_on(v) || Expr(n.b).depends_on(v);
  }
}

bool Expr::is_constant(double v) const { return is_const(node_, v); }

const char* fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Tanh: return "tanh";
    case UnaryFn::Sqrt: return "sqrt";
  }
  return "?";
}

const char* var_name(Var v) {
  switch (v) {
    case Var::X: return "x";
    case Var::Y: return "y";
    case Var::Alpha: return "alpha";
  }
  return "?";
}

namespace {

// Precedence levels for printing: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    case ExprNode::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const ExprNode& n, std::string& out, int parent_prec) {
  const int prec = precedence(n);
  const bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case ExprNode::Kind::Const:
      if (n.value < 0.0) {
        out += '(';
        out += format_number(n.value);
        out += ')';
      } else {
        out += format_number(n.value);
      }
      break;
    case ExprNode::Kind::Variable: out += var_name(n.var); break;
    case ExprNode::Kind::Neg:
      out += '-';
      print_node(*n.a, out, 4);
      break;
    case ExprNode::Kind::Add:
      print_node(*n.a, out, 1);
      out += " + ";
      print_node(*n.b, out, 2);
      break;
    case ExprNode::Kind::Sub:
      print_node(*n.a, out, 1);
      out += " - ";
      print_node(*n.b, out, 2);
      break;
    case ExprNode::Kind::Mul:
      print_node(*n.a, out, 2);
      out += "*";
      print_node(*n.b, out, 3);
      break;
    case ExprNode::Kind::Div:
      print_node(*n.a, out, 2);
      out += "/";
      print_node(*n.b, out, 3);
      break;
    case ExprNode::Kind::Pow:
      print_node(*n.a, out, 5);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    case ExprNode::Kind::Fn:
      out += fn_name(n.fn);
      out += '(';
      print_node(*n.a, out, 0);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_node(*node_, out, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Parser: hand-written lexer + recursive descent over the grammar above.

namespace {

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind = Kind::End;
  double number = 0.0;
  bool number_is_integer = false;
  std::string ident;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws_and_comments();
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Token::Kind::Plus; ++pos_; return;
      case '-': tok_.kind = Token::Kind::Minus; ++pos_; return;
      case '*': tok_.kind = Token::Kind::Star; ++pos_; return;
      case '/': tok_.kind = Token::Kind::Slash; ++pos_; return;
      case '^': tok_.kind = Token::Kind::Caret; ++pos_; return;
      case '(': tok_.kind = Token::Kind::LParen; ++pos_; return;
      case ')': tok_.kind = Token::Kind::RParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.ident = std::string(src_.substr(start, pos_ - start));
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(pos_),
                     pos_, "a token");
  }

  void lex_number() {
    const std::size_t start = pos_;
    bool has_dot = false, has_exp = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      has_dot = true;
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        has_exp = true;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // 'e' belongs to a following identifier, not this number
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    tok_.kind = Token::Kind::Number;
    tok_.number = std::strtod(text.c_str(), nullptr);
    tok_.number_is_integer = !has_dot && !has_exp;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Expr parse() {
    Expr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::End)
      throw ParseError("trailing input at offset " + std::to_string(t.offset), t.offset,
                       "end of input or an operator");
    return e;
  }

 private:
  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::Plus) {
        lex_.take();
        e = e + parse_term();
      } else if (t.kind == Token::Kind::Minus) {
        lex_.take();
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::Star) {
        lex_.take();
        e = e * parse_factor();
      } else if (t.kind == Token::Kind::Slash) {
        lex_.take();
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (lex_.peek().kind == Token::Kind::Caret) {
      lex_.take();
      const Token t = lex_.take();
      if (t.kind != Token::Kind::Number || !t.number_is_integer)
        throw ParseError("exponent must be an integer literal (offset " +
                             std::to_string(t.offset) + ")",
                         t.offset, "an integer literal");
      return Expr::pow(base, static_cast<int>(t.number));
    }
    return base;
  }

  Expr parse_base() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::Number: return Expr::constant(t.number);
      // Unary minus binds looser than '^': -x^2 means -(x^2).
      case Token::Kind::Minus: return -parse_factor();
      case Token::Kind::LParen: {
        Expr e = parse_expr();
        expect_rparen();
        return e;
      }
      case Token::Kind::Ident: {
        if (t.ident == "x") return Expr::variable(Var::X);
        if (t.ident == "y") return Expr::variable(Var::Y);
        if (t.ident == "alpha") return Expr::variable(Var::Alpha);
        for (UnaryFn fn : {UnaryFn::Sin, UnaryFn::Cos, UnaryFn::Exp, UnaryFn::Log, UnaryFn::Tanh,
                           UnaryFn::Sqrt}) {
          if (t.ident == fn_name(fn)) {
            expect_lparen(t.ident);
            Expr arg = parse_expr();
            expect_rparen();
            return Expr::apply(fn, arg);
          }
        }
        throw ParseError("unknown identifier '" + t.ident + "' at offset " +
                             std::to_string(t.offset),
                         t.offset, "x, y, alpha, or a function name");
      }
      default:
        throw ParseError("unexpected token at offset " + std::to_string(t.offset), t.offset,
                         "a number, variable, function call, '(' or '-'");
    }
  }

  void expect_lparen(const std::string& fn) {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::LParen)
      throw ParseError("expected '(' after '" + fn + "' at offset " + std::to_string(t.offset),
                       t.offset, "'('");
  }

  void expect_rparen() {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::RParen)
      throw ParseError("expected ')' at offset " + std::to_string(t.offset), t.offset, "')'");
  }

  Lexer lex_;
};

}  // namespace

Expr parse_expression(std::string_view source) { return Parser(source).parse(); }

}  // namespace dae
