#pragma once

#include <span>
#include <string>
#include <vector>

#include "ltvc/sim.hpp"
#include "ltvc/systems.hpp"

namespace ltvc {

enum class Decision { Commutative, NotCommutative, Inconclusive };

std::string to_string(Decision d);

/// Decision thresholds. Between `pass` and `fail` lies the Inconclusive band.
struct Thresholds {
  double pass = 1e-5;
  double fail = 1e-3;
  double constancy = 1e-6;
};

struct ProbeDiscrepancy {
  std::string probe;
  double coarse = 0.0;  // D at the base step
  double fine = 0.0;    // D at the refined step
};

/// Outcome of comparing AB against BA over a probe family at two steps.
/// Commutative: worst D < pass at both steps. NotCommutative: worst D > fail
/// at both steps. Anything else, including a simulation failure, is
/// Inconclusive. Failed probes carry NaN discrepancies, and so do the
/// worst values when any probe failed.
struct Verdict {
  Decision decision = Decision::Inconclusive;
  double worst_coarse = 0.0;
  double worst_fine = 0.0;
  double step_coarse = 0.0;
  double step_fine = 0.0;
  std::vector<ProbeDiscrepancy> probes;
  std::string diagnostic;
  /// AB and BA traces for the first probe at the base step (empty on failure).
  Trace first_ab;
  Trace first_ba;

  double worst() const;
};

/// max_k |s_k - mean| / (1 + |mean|)
double constancy_measure(std::span<const double> samples);

Verdict numerical_commute_check(const LtvSystem& a, const LtvSystem& b,
                                const std::vector<Signal>& probes, const SolverOptions& opts,
                                const Thresholds& thresholds = {});

class CommuteError : public Error {
 public:
  enum class Kind { OrderMismatch, VanishingDivisor, NonPositiveLeading, DegenerateAlpha };

  CommuteError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Constant vector c solving b = M(a) c row by row, with each row's
/// deviation from a constant. These are necessary conditions only.
struct StructuralResult {
  bool satisfied = false;
  /// c_N .. c_0, estimated as grid means.
  std::vector<double> constants;
  /// constancy_measure of each row's c(t), same order as constants.
  std::vector<double> residuals;
  /// Both systems were negated because a_2 < 0 on the whole grid.
  bool negated = false;
};

/// First-order pair: b1 = c1 a1, b0 = c1 a0 + c0.
StructuralResult structural_check_n1(const LtvSystem& a, const LtvSystem& b,
                                     std::span<const double> grid, double tau_const);

/// Second-order pair:
///   b2 = c2 a2
///   b1 = c2 a1 + c1 sqrt(a2)
///   b0 = c2 a0 + c1 (2 a1 - a2') / (4 sqrt(a2)) + c0
/// with a2' obtained symbolically. Requires a2 > 0 on the grid, or a2 < 0
/// on all of it (then both systems are negated first).
StructuralResult structural_check_n2(const LtvSystem& a, const LtvSystem& b,
                                     std::span<const double> grid, double tau_const);

enum class GainClass { AlwaysCommutative, Commutative, NotCommutative };

std::string to_string(GainClass g);

/// Whether a conjugate with these gains can commute with its base: only
/// constant gains qualify for order >= 1; scalar bases always commute.
/// The implied constants are c_N = 1/alpha and c_0 = beta (grid means).
struct GainConstancyResult {
  GainClass decision = GainClass::NotCommutative;
  double c_leading = 0.0;
  double c_zero = 0.0;
  double alpha_residual = 0.0;
  double beta_residual = 0.0;
};

GainConstancyResult theorem1_check(int base_order, const GainPair& gains,
                                   std::span<const double> grid, double tau_const);

/// Fit of alpha2 = p alpha1, beta2 = beta1 / p + q between two conjugates
/// of the same base (p = 1/c_N, q = c_0).
struct RelationFit {
  double p = 0.0;
  double q = 0.0;
  double alpha_residual = 0.0;
  double beta_residual = 0.0;
  bool satisfied = false;
};

RelationFit theorem2_fit(const GainPair& g1, const GainPair& g2, std::span<const double> grid,
                         double tau_const);

}  // namespace ltvc
