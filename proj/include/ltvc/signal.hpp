#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ltvc/expr.hpp"
#include "ltvc/systems.hpp"

namespace ltvc {

/// x(t) = 1 for t >= t0 of the simulation domain.
struct UnitStep {};

/// amplitude * sin(omega * t + phase)
struct Sinusoid {
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
};

/// Linear chirp sweeping f0 -> f1 (Hz) across the simulation domain.
struct Chirp {
  double amplitude = 1.0;
  double f0 = 0.1;
  double f1 = 2.0;
};

/// Linear interpolation between knots, held constant outside them.
class PiecewiseLinear {
 public:
  /// Knot times must be strictly increasing; at least one knot.
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }
  double operator()(double t) const;

 private:
  std::vector<std::pair<double, double>> knots_;
};

struct Analytic {
  Expr expr;
};

using Signal = std::variant<UnitStep, Sinusoid, Chirp, PiecewiseLinear, Analytic>;

/// Value at t for a simulation running on `domain`.
double evaluate(const Signal& signal, double t, const Domain& domain);

std::string describe(const Signal& signal);

/// Default falsification family: unit step, sin(2t), chirp 0.1 -> 2 Hz and
/// a ramp to 1 over the first 40% of the domain followed by a hold.
std::vector<Signal> default_probes(const Domain& domain);

}  // namespace ltvc
