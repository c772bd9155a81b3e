#include "ltvc/expr.hpp"

#include <charconv>
#include <cmath>
#include <utility>

namespace ltvc {

struct Expr::Node {
  Op op;
  double number;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

bool is_unary(Op op) {
  switch (op) {
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Ln:
    case Op::Sqrt:
      return true;
    default:
      return false;
  }
}

bool is_binary(Op op) {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Printing precedence: sums 1, products 2, negation 3, powers 4, atoms 5.
int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    case Op::Constant:
      return std::signbit(e.number()) ? 3 : 5;
    default:
      return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Constant:
      out += format_number(e.number());
      return;
    case Op::Time:
      out += 't';
      return;
    case Op::Neg:
      out += '-';
      print_wrapped(e.lhs(), precedence(e.lhs()) < 3, out);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      switch (e.op()) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
    case Op::Pow:
      print_wrapped(e.lhs(), precedence(e.lhs()) < 5, out);
      out += '^';
      out += format_number(e.number());
      return;
    default:
      out += function_name(e.op());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
  }
}

[[noreturn]] void fail(const Expr& e, double t, const char* reason) {
  throw EvalError(to_string(e), t, reason);
}

double checked(const Expr& e, double t, double v) {
  if (!std::isfinite(v)) fail(e, t, "non-finite result");
  return v;
}

double evaluate(const Expr& e, double t) {
  switch (e.op()) {
    case Op::Constant:
      return e.number();
    case Op::Time:
      return t;
    case Op::Neg:
      return -evaluate(e.lhs(), t);
    case Op::Add:
      return checked(e, t, evaluate(e.lhs(), t) + evaluate(e.rhs(), t));
    case Op::Sub:
      return checked(e, t, evaluate(e.lhs(), t) - evaluate(e.rhs(), t));
    case Op::Mul:
      return checked(e, t, evaluate(e.lhs(), t) * evaluate(e.rhs(), t));
    case Op::Div: {
      const double num = evaluate(e.lhs(), t);
      const double den = evaluate(e.rhs(), t);
      if (den == 0.0) fail(e, t, "division by zero");
      return checked(e, t, num / den);
    }
    case Op::Pow: {
      const double base = evaluate(e.lhs(), t);
      const double k = e.number();
      if (base < 0.0 && std::trunc(k) != k) {
        fail(e, t, "negative base with non-integer exponent");
      }
      if (base == 0.0 && k < 0.0) fail(e, t, "division by zero");
      return checked(e, t, std::pow(base, k));
    }
    case Op::Sin:
      return std::sin(evaluate(e.lhs(), t));
    case Op::Cos:
      return std::cos(evaluate(e.lhs(), t));
    case Op::Exp:
      return checked(e, t, std::exp(evaluate(e.lhs(), t)));
    case Op::Ln: {
      const double v = evaluate(e.lhs(), t);
      if (v <= 0.0) fail(e, t, "ln of nonpositive value");
      return std::log(v);
    }
    case Op::Sqrt: {
      const double v = evaluate(e.lhs(), t);
      if (v < 0.0) fail(e, t, "sqrt of negative value");
      return std::sqrt(v);
    }
  }
  return 0.0;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{Op::Constant, value, nullptr, nullptr}));
}

Expr Expr::time() {
  return Expr(std::make_shared<const Node>(Node{Op::Time, 0.0, nullptr, nullptr}));
}

Expr Expr::unary(Op op, Expr arg) {
  if (!is_unary(op)) throw Error("Expr::unary: not a unary operator");
  return Expr(std::make_shared<const Node>(Node{op, 0.0, std::move(arg.node_), nullptr}));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (!is_binary(op)) throw Error("Expr::binary: not a binary operator");
  return Expr(std::make_shared<const Node>(
      Node{op, 0.0, std::move(lhs.node_), std::move(rhs.node_)}));
}

Expr Expr::power(Expr base, double exponent) {
  if (!std::isfinite(exponent)) throw Error("Expr::power: exponent must be finite");
  return Expr(std::make_shared<const Node>(Node{Op::Pow, exponent, std::move(base.node_), nullptr}));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::number() const noexcept { return node_->number; }
Expr Expr::lhs() const { return Expr(node_->lhs); }
Expr Expr::rhs() const { return Expr(node_->rhs); }

double Expr::operator()(double t) const { return evaluate(*this, t); }

Expr operator-(const Expr& e) { return Expr::unary(Op::Neg, e); }
Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

EvalError::EvalError(std::string node, double t, const std::string& reason)
    : Error(reason + " in '" + node + "' at t=" + format_number(t)),
      node_(std::move(node)),
      time_(t) {}

double eval(const Expr& e, double t) { return evaluate(e, t); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Constant:
      return a.number() == b.number() && std::signbit(a.number()) == std::signbit(b.number());
    case Op::Time:
      return true;
    case Op::Pow:
      return a.number() == b.number() && structurally_equal(a.lhs(), b.lhs());
    default:
      if (!structurally_equal(a.lhs(), b.lhs())) return false;
      return !is_binary(a.op()) || structurally_equal(a.rhs(), b.rhs());
  }
}

bool depends_on_time(const Expr& e) {
  switch (e.op()) {
    case Op::Constant:
      return false;
    case Op::Time:
      return true;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return depends_on_time(e.lhs()) || depends_on_time(e.rhs());
    default:
      return depends_on_time(e.lhs());
  }
}

}  // namespace ltvc
