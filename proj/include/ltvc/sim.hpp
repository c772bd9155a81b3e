#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ltvc/parallel.hpp"
#include "ltvc/signal.hpp"
#include "ltvc/systems.hpp"

namespace ltvc {

/// Any state component beyond this magnitude is reported as blow-up.
inline constexpr double kBlowUpThreshold = 1e12;

struct SolverOptions {
  /// Requested RK4 step; rounded so that a whole number of steps spans the domain.
  double step = 1e-3;
  /// Step divisor for the verdict-stability rerun.
  int refinement = 2;
  Execution execution = Execution::Parallel;
};

class SimulationError : public Error {
 public:
  enum class Kind { NonFiniteState, DomainMismatch, InvalidStep, GridMismatch };

  SimulationError(Kind kind, const std::string& what, double time = 0.0)
      : Error(what), kind_(kind), time_(time) {}

  Kind kind() const noexcept { return kind_; }
  double time() const noexcept { return time_; }

 private:
  Kind kind_;
  double time_;
};

/// Uniform step grid over a domain. RK4 evaluates the right-hand side at
/// the grid points and at the midpoints between them; those 2n+1 "stage
/// points" are indexed by j, with grid point k at j = 2k.
class StepGrid {
 public:
  /// Throws SimulationError::InvalidStep unless step > 0 yields >= 10 steps.
  StepGrid(const Domain& domain, double requested_step);

  const Domain& domain() const noexcept { return domain_; }
  std::size_t steps() const noexcept { return steps_; }
  double step() const noexcept { return domain_.span() / static_cast<double>(steps_); }
  std::size_t stage_count() const noexcept { return 2 * steps_ + 1; }
  double stage_time(std::size_t j) const noexcept;
  double time(std::size_t k) const noexcept { return stage_time(2 * k); }
  /// Same domain, step divided by `factor`.
  StepGrid refined(int factor) const;

 private:
  StepGrid(const Domain& domain, std::size_t steps) : domain_(domain), steps_(steps) {}
  Domain domain_;
  std::size_t steps_;
};

/// Sampled input/output of one run. state_dim is the integrated dimension.
struct Trace {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  int state_dim = 0;
};

/// Companion (first-order) form of an LTV system, with state
/// z = (y, y', ..., y^(N-1)) and y^(N) = (x - sum_{n<N} a_n y^(n)) / a_N.
class StateForm {
 public:
  explicit StateForm(LtvSystem sys) : sys_(std::move(sys)) {}

  int order() const noexcept { return sys_.order(); }
  /// dz for order >= 1. z and dz have length order().
  void derivative(double t, std::span<const double> z, double x, std::span<double> dz) const;
  std::vector<double> derivative(double t, std::span<const double> z, double x) const;
  /// y = x / a_0(t) for order 0.
  double algebraic_output(double t, double x) const;

 private:
  LtvSystem sys_;
};

StateForm to_state_form(const LtvSystem& sys);

/// Data-parallel sampling kernels over the stage points of a grid.
std::vector<double> sample_on_stages(const Expr& e, const StepGrid& grid, Execution exec);
std::vector<double> sample_on_stages(const Signal& s, const StepGrid& grid, Execution exec);

/// Fixed-step classical RK4 from the zero state.
Trace simulate(const LtvSystem& sys, const Signal& input, const SolverOptions& opts);

/// `first` feeds `second`; both integrated as one joint state.
Trace simulate_cascade(const LtvSystem& first, const LtvSystem& second, const Signal& input,
                       const SolverOptions& opts);

/// base driven by alpha(t) * (x(t) - beta(t) * y(t)); output is base's output.
Trace simulate_closed_loop(const LtvSystem& base, const GainPair& gains, const Signal& input,
                           const SolverOptions& opts);

/// max_k |y_a - y_b| / (1 + max_k max(|y_a|, |y_b|)).
double discrepancy(const Trace& a, const Trace& b);

/// CSV with header `t,x,y` and 17 significant digits.
void write_trace_csv(const Trace& trace, std::ostream& os);
void write_trace_csv(const Trace& trace, const std::string& path);

}  // namespace ltvc
