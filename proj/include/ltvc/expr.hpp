#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "ltvc/error.hpp"

namespace ltvc {

/// Node kinds of the time-expression language.
enum class Op : unsigned char {
  Constant,
  Time,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // constant real exponent only
  Sin,
  Cos,
  Exp,
  Ln,
  Sqrt,
};

/// Immutable real-valued function of time t. Copies share structure.
///
/// The language holds constants, the variable t, negation, the four
/// arithmetic operators, powers with constant exponent and the unary
/// functions sin, cos, exp, ln and sqrt.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr time();
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr power(Expr base, double exponent);

  Op op() const noexcept;
  /// Constant value, or the exponent of a Pow node.
  double number() const noexcept;
  /// Operand of unary nodes and the base of Pow; left operand of binary nodes.
  Expr lhs() const;
  Expr rhs() const;

  bool is_constant() const noexcept { return op() == Op::Constant; }
  bool is_constant(double value) const noexcept {
    return is_constant() && number() == value;
  }

  /// Evaluate at time t. Throws EvalError on a domain violation.
  double operator()(double t) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend bool structurally_equal(const Expr& a, const Expr& b);
};

Expr operator-(const Expr& e);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Thrown by parse(). offset() is the byte position of the offending token.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, NonConstantExponent };

  ParseError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Thrown by evaluation: division by zero, ln of a nonpositive value,
/// sqrt of a negative value, or a non-finite intermediate.
class EvalError : public Error {
 public:
  EvalError(std::string node, double t, const std::string& reason);

  /// Printed form of the subexpression that failed.
  const std::string& node() const noexcept { return node_; }
  double time() const noexcept { return time_; }

 private:
  std::string node_;
  double time_;
};

/// Infix grammar over numbers, t, + - * / ^, sin cos exp ln sqrt and
/// parentheses. ^ binds tightest and is right-associative; unary minus
/// binds tighter than * and /. Exponents must fold to a constant.
Expr parse(std::string_view text);

double eval(const Expr& e, double t);

/// Symbolic d/dt, returned simplified.
Expr differentiate(const Expr& e);

/// Constant folding plus the usual identities for 0, 1 and negation.
/// Semantics-preserving wherever the input is defined; idempotent.
/// Constant quotients are folded only when the result is an integer,
/// so 1/2 prints as "1/2".
Expr simplify(const Expr& e);

/// Minimal-parenthesis infix form that parses back to the same function.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// True when t occurs anywhere in e.
bool depends_on_time(const Expr& e);

}  // namespace ltvc
