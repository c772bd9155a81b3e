#include <cmath>
#include <optional>

#include "ltvc/expr.hpp"

namespace ltvc {
namespace {

// Smart constructors. Given already-simplified operands they return a
// simplified node, which is what makes simplify() idempotent.

std::optional<double> folded(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}

Expr make_neg(const Expr& x) {
  if (x.is_constant()) return Expr::constant(-x.number());
  if (x.op() == Op::Neg) return x.lhs();
  return -x;
}

Expr make_add(const Expr& a, const Expr& b);
Expr make_sub(const Expr& a, const Expr& b);

Expr make_add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = folded(a.number() + b.number())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.op() == Op::Neg) return make_sub(a, b.lhs());
  if (b.is_constant() && b.number() < 0.0) return make_sub(a, Expr::constant(-b.number()));
  return a + b;
}

Expr make_sub(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = folded(a.number() - b.number())) return Expr::constant(*v);
  }
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return make_neg(b);
  if (structurally_equal(a, b)) return Expr::constant(0.0);
  if (b.op() == Op::Neg) return make_add(a, b.lhs());
  if (b.is_constant() && b.number() < 0.0) return make_add(a, Expr::constant(-b.number()));
  return a - b;
}

Expr make_mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = folded(a.number() * b.number())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return make_neg(b);
  if (b.is_constant(-1.0)) return make_neg(a);
  return a * b;
}

bool is_negation_of(const Expr& a, const Expr& b) {
  return a.op() == Op::Neg && structurally_equal(a.lhs(), b);
}

Expr make_div(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.number() != 0.0) {
    const double q = a.number() / b.number();
    if (std::isfinite(q) && std::trunc(q) == q) return Expr::constant(q);
  }
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(-1.0)) return make_neg(a);
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (!b.is_constant(0.0)) {
    if (structurally_equal(a, b)) return Expr::constant(1.0);
    if (is_negation_of(a, b) || is_negation_of(b, a)) return Expr::constant(-1.0);
  }
  return a / b;
}

Expr make_pow(const Expr& base, double k) {
  if (k == 0.0) return Expr::constant(1.0);
  if (k == 1.0) return base;
  if (base.is_constant()) {
    const double b = base.number();
    const bool defined = !(b < 0.0 && std::trunc(k) != k) && !(b == 0.0 && k < 0.0);
    if (defined) {
      if (auto v = folded(std::pow(b, k))) return Expr::constant(*v);
    }
  }
  return Expr::power(base, k);
}

Expr make_function(Op op, const Expr& x) {
  if (x.is_constant()) {
    const double v = x.number();
    std::optional<double> r;
    switch (op) {
      case Op::Sin: r = folded(std::sin(v)); break;
      case Op::Cos: r = folded(std::cos(v)); break;
      case Op::Exp: r = folded(std::exp(v)); break;
      case Op::Ln:
        if (v > 0.0) r = folded(std::log(v));
        break;
      case Op::Sqrt:
        if (v >= 0.0) r = folded(std::sqrt(v));
        break;
      default: break;
    }
    if (r) return Expr::constant(*r);
  }
  return Expr::unary(op, x);
}

Expr rebuild(Op op, const Expr& e, const Expr& l, const Expr& r) {
  switch (op) {
    case Op::Constant:
    case Op::Time:
      return e;
    case Op::Neg: return make_neg(l);
    case Op::Add: return make_add(l, r);
    case Op::Sub: return make_sub(l, r);
    case Op::Mul: return make_mul(l, r);
    case Op::Div: return make_div(l, r);
    case Op::Pow: return make_pow(l, e.number());
    default: return make_function(op, l);
  }
}

Expr simplify_rec(const Expr& e) {
  switch (e.op()) {
    case Op::Constant:
    case Op::Time:
      return e;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return rebuild(e.op(), e, simplify_rec(e.lhs()), simplify_rec(e.rhs()));
    default:
      return rebuild(e.op(), e, simplify_rec(e.lhs()), Expr());
  }
}

// Operates on simplified input and keeps every intermediate simplified.
Expr derive(const Expr& e) {
  const Expr zero = Expr::constant(0.0);
  switch (e.op()) {
    case Op::Constant:
      return zero;
    case Op::Time:
      return Expr::constant(1.0);
    case Op::Neg:
      return make_neg(derive(e.lhs()));
    case Op::Add:
      return make_add(derive(e.lhs()), derive(e.rhs()));
    case Op::Sub:
      return make_sub(derive(e.lhs()), derive(e.rhs()));
    case Op::Mul: {
      const Expr u = e.lhs();
      const Expr v = e.rhs();
      return make_add(make_mul(derive(u), v), make_mul(u, derive(v)));
    }
    case Op::Div: {
      const Expr u = e.lhs();
      const Expr v = e.rhs();
      if (!depends_on_time(v)) return make_div(derive(u), v);
      const Expr num = make_sub(make_mul(derive(u), v), make_mul(u, derive(v)));
      return make_div(num, make_pow(v, 2.0));
    }
    case Op::Pow: {
      const Expr u = e.lhs();
      const double k = e.number();
      return make_mul(make_mul(Expr::constant(k), make_pow(u, k - 1.0)), derive(u));
    }
    case Op::Sin:
      return make_mul(make_function(Op::Cos, e.lhs()), derive(e.lhs()));
    case Op::Cos:
      return make_neg(make_mul(make_function(Op::Sin, e.lhs()), derive(e.lhs())));
    case Op::Exp:
      return make_mul(e, derive(e.lhs()));
    case Op::Ln:
      return make_div(derive(e.lhs()), e.lhs());
    case Op::Sqrt:
      return make_div(derive(e.lhs()), make_mul(Expr::constant(2.0), e));
  }
  return zero;
}

}  // namespace

Expr simplify(const Expr& e) { return simplify_rec(e); }

Expr differentiate(const Expr& e) { return simplify(derive(simplify(e))); }

}  // namespace ltvc
