#include "ltvc/systems.hpp"

#include <cmath>
#include <string>

namespace ltvc {

std::vector<double> uniform_grid(const Domain& domain, std::size_t points) {
  if (points < 2) throw Error("uniform_grid: need at least two points");
  std::vector<double> grid(points);
  const double span = domain.span();
  const double last = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = domain.t0 + span * (static_cast<double>(k) / last);
  }
  grid.back() = domain.t1;
  return grid;
}

LtvSystem make_system(std::vector<Expr> coeffs, Domain domain) {
  if (coeffs.empty()) {
    throw SystemError(SystemError::Kind::EmptyCoefficients, "system needs at least one coefficient");
  }
  if (!std::isfinite(domain.t0) || !std::isfinite(domain.t1) || !(domain.t1 > domain.t0)) {
    throw SystemError(SystemError::Kind::BadDomain,
                      "domain [" + std::to_string(domain.t0) + ", " + std::to_string(domain.t1) +
                          "] is empty or not finite");
  }
  const auto grid = uniform_grid(domain);
  const int order = static_cast<int>(coeffs.size()) - 1;
  for (double t : grid) {
    for (int n = 0; n <= order; ++n) {
      double v = 0.0;
      try {
        v = eval(coeffs[static_cast<std::size_t>(n)], t);
      } catch (const EvalError& e) {
        throw SystemError(SystemError::Kind::UndefinedCoefficient,
                          "coefficient a_" + std::to_string(n) + ": " + e.what(), t);
      }
      if (n == order && !(std::abs(v) > kLeadingEpsilon)) {
        throw SystemError(SystemError::Kind::VanishingLeadingCoefficient,
                          "leading coefficient a_" + std::to_string(order) + " = " +
                              to_string(coeffs.back()) + " vanishes at t=" + std::to_string(t),
                          t);
      }
    }
  }
  return LtvSystem(std::move(coeffs), domain);
}

void validate_gains(const GainPair& gains, std::span<const double> grid) {
  for (double t : grid) {
    double a = 0.0;
    try {
      a = eval(gains.alpha, t);
      eval(gains.beta, t);
    } catch (const EvalError& e) {
      throw SystemError(SystemError::Kind::UndefinedCoefficient, std::string("gain: ") + e.what(), t);
    }
    if (!(std::abs(a) > kLeadingEpsilon)) {
      throw SystemError(SystemError::Kind::VanishingGain,
                        "forward gain alpha = " + to_string(gains.alpha) + " vanishes at t=" +
                            std::to_string(t),
                        t);
    }
  }
}

void validate_gains(const GainPair& gains, const Domain& domain) {
  validate_gains(gains, uniform_grid(domain));
}

LtvSystem feedback_conjugate(const LtvSystem& base, const GainPair& gains) {
  validate_gains(gains, base.domain());
  std::vector<Expr> out;
  out.reserve(base.coeffs().size());
  for (int n = 0; n <= base.order(); ++n) {
    Expr b = base.coeff(n) / gains.alpha;
    if (n == 0) b = b + gains.beta;
    out.push_back(simplify(b));
  }
  return make_system(std::move(out), base.domain());
}

std::vector<std::vector<double>> sample_coefficients(const LtvSystem& sys,
                                                     std::span<const double> grid) {
  std::vector<std::vector<double>> rows;
  rows.reserve(sys.coeffs().size());
  for (const Expr& c : sys.coeffs()) {
    std::vector<double> row(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) row[k] = eval(c, grid[k]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ltvc
