#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ltvc/expr.hpp"

namespace ltvc {

/// Closed time interval [t0, t1].
struct Domain {
  double t0 = 0.0;
  double t1 = 5.0;

  double span() const noexcept { return t1 - t0; }
  bool contains(double t) const noexcept { return t >= t0 && t <= t1; }
  friend bool operator==(const Domain&, const Domain&) = default;
};

inline constexpr std::size_t kValidationGridPoints = 1001;
inline constexpr double kLeadingEpsilon = 1e-9;

/// `points` uniformly spaced samples including both end points.
std::vector<double> uniform_grid(const Domain& domain, std::size_t points = kValidationGridPoints);

class SystemError : public Error {
 public:
  enum class Kind {
    EmptyCoefficients,
    BadDomain,
    VanishingLeadingCoefficient,
    VanishingGain,
    UndefinedCoefficient,
  };

  SystemError(Kind kind, const std::string& what, double time = 0.0)
      : Error(what), kind_(kind), time_(time) {}

  Kind kind() const noexcept { return kind_; }
  /// First offending time, where one applies.
  double time() const noexcept { return time_; }

 private:
  Kind kind_;
  double time_;
};

/// sum_{n=0}^{N} a_n(t) y^(n)(t) = x(t) on a closed domain, with a_N(t)
/// bounded away from zero on the validation grid.
class LtvSystem {
 public:
  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  /// a_0 .. a_N, low to high.
  const std::vector<Expr>& coeffs() const noexcept { return coeffs_; }
  const Expr& coeff(int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }
  const Expr& leading() const noexcept { return coeffs_.back(); }
  const Domain& domain() const noexcept { return domain_; }

 private:
  LtvSystem(std::vector<Expr> coeffs, Domain domain)
      : coeffs_(std::move(coeffs)), domain_(domain) {}

  std::vector<Expr> coeffs_;
  Domain domain_;

  friend LtvSystem make_system(std::vector<Expr> coeffs, Domain domain);
};

/// Validates and builds a system from a_0..a_N. Every coefficient must be
/// defined on the validation grid and |a_N| > kLeadingEpsilon there.
LtvSystem make_system(std::vector<Expr> coeffs, Domain domain);

/// Forward path gain alpha(t) and feedback path gain beta(t) of the
/// single-loop feedback conjugate.
struct GainPair {
  Expr alpha;
  Expr beta;
};

/// Checks |alpha| > kLeadingEpsilon and that beta is defined on the grid.
void validate_gains(const GainPair& gains, std::span<const double> grid);
void validate_gains(const GainPair& gains, const Domain& domain);

/// Same-order system realized by closing the loop around `base`:
/// b_n = a_n / alpha for n >= 1 and b_0 = a_0 / alpha + beta.
/// Coefficients stay symbolic so they can be differentiated later.
LtvSystem feedback_conjugate(const LtvSystem& base, const GainPair& gains);

/// Samples each coefficient on `grid`; row n holds a_n.
std::vector<std::vector<double>> sample_coefficients(const LtvSystem& sys,
                                                     std::span<const double> grid);

}  // namespace ltvc
