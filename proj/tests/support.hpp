#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ltvc/expr.hpp"
#include "ltvc/systems.hpp"

namespace ltvc::test {

inline LtvSystem system_of(std::vector<std::string> coeffs_low_to_high, Domain d = {0.0, 5.0}) {
  std::vector<Expr> exprs;
  for (const auto& c : coeffs_low_to_high) exprs.push_back(parse(c));
  return make_system(std::move(exprs), d);
}

inline GainPair gains_of(const std::string& alpha, const std::string& beta) {
  return GainPair{parse(alpha), parse(beta)};
}

inline std::optional<double> try_eval(const Expr& e, double t) {
  try {
    return eval(e, t);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

/// Central finite difference, the independent derivative oracle.
inline double central_difference(const Expr& e, double t, double h = 1e-5) {
  return (eval(e, t + h) - eval(e, t - h)) / (2.0 * h);
}

/// Random expressions over the whole language. Some are undefined at some
/// points (ln of negatives, division by zero); callers skip those points.
class ExprGenerator {
 public:
  explicit ExprGenerator(unsigned seed) : rng_(seed) {}

  Expr operator()(int depth = 4) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 12);
    switch (pick(rng_)) {
      case 0: return Expr::time();
      case 1: return Expr::constant(constant());
      case 2: return Expr::unary(Op::Neg, (*this)(depth - 1));
      case 3: return Expr::binary(Op::Add, (*this)(depth - 1), (*this)(depth - 1));
      case 4: return Expr::binary(Op::Sub, (*this)(depth - 1), (*this)(depth - 1));
      case 5: return Expr::binary(Op::Mul, (*this)(depth - 1), (*this)(depth - 1));
      case 6: return Expr::binary(Op::Div, (*this)(depth - 1), (*this)(depth - 1));
      case 7: {
        static const double exps[] = {0.0, 1.0, 2.0, 3.0, -1.0, 0.5, -2.0};
        std::uniform_int_distribution<int> k(0, 6);
        return Expr::power((*this)(depth - 1), exps[k(rng_)]);
      }
      case 8: return Expr::unary(Op::Sin, (*this)(depth - 1));
      case 9: return Expr::unary(Op::Cos, (*this)(depth - 1));
      case 10: return Expr::unary(Op::Exp, Expr::binary(Op::Mul, Expr::constant(0.1), (*this)(depth - 1)));
      case 11: return Expr::unary(Op::Ln, (*this)(depth - 1));
      default: return Expr::unary(Op::Sqrt, (*this)(depth - 1));
    }
  }

 private:
  double constant() {
    static const double values[] = {0.0, 1.0, -1.0, 2.0, 0.5, 3.0, -0.25, 1.5, 7.0, 0.1};
    std::uniform_int_distribution<int> k(0, 9);
    return values[k(rng_)];
  }

  std::mt19937 rng_;
};

inline bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace ltvc::test
