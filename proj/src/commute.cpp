#include "ltvc/commute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ltvc {

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Commutative: return "Commutative";
    case Decision::NotCommutative: return "NotCommutative";
    case Decision::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(GainClass g) {
  switch (g) {
    case GainClass::AlwaysCommutative: return "AlwaysCommutative";
    case GainClass::Commutative: return "Commutative";
    case GainClass::NotCommutative: return "NotCommutative";
  }
  return "?";
}

double Verdict::worst() const { return std::max(worst_coarse, worst_fine); }

double constancy_measure(std::span<const double> samples) {
  if (samples.empty()) throw Error("constancy_measure: no samples");
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  double dev = 0.0;
  for (double s : samples) dev = std::max(dev, std::abs(s - mean));
  return dev / (1.0 + std::abs(mean));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> sample(const Expr& e, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = eval(e, grid[k]);
  return out;
}

struct PairRun {
  double d = kNaN;
  std::string error;
  Trace ab;
  Trace ba;
};

}  // namespace

Verdict numerical_commute_check(const LtvSystem& a, const LtvSystem& b,
                                const std::vector<Signal>& probes, const SolverOptions& opts,
                                const Thresholds& thresholds) {
  if (probes.empty()) throw Error("numerical_commute_check: empty probe family");
  if (!(a.domain() == b.domain())) {
    throw SimulationError(SimulationError::Kind::DomainMismatch,
                          "systems are defined on different domains");
  }
  const StepGrid coarse(a.domain(), opts.step);
  const StepGrid fine = coarse.refined(opts.refinement);

  SolverOptions coarse_opts = opts;
  coarse_opts.step = coarse.step();
  coarse_opts.execution = Execution::Serial;
  SolverOptions fine_opts = coarse_opts;
  fine_opts.step = fine.step();

  // Task i: probe i / 2, coarse when i is even, refined when odd.
  std::vector<PairRun> runs(2 * probes.size());
  for_each_index(runs.size(), opts.execution, [&](std::size_t i) {
    const Signal& probe = probes[i / 2];
    const SolverOptions& o = (i % 2 == 0) ? coarse_opts : fine_opts;
    PairRun& run = runs[i];
    try {
      run.ab = simulate_cascade(a, b, probe, o);
      run.ba = simulate_cascade(b, a, probe, o);
      run.d = discrepancy(run.ab, run.ba);
    } catch (const Error& e) {
      run.error = e.what();
    }
  });

  Verdict v;
  v.step_coarse = coarse.step();
  v.step_fine = fine.step();
  bool failed = false;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const PairRun& c = runs[2 * p];
    const PairRun& f = runs[2 * p + 1];
    v.probes.push_back({describe(probes[p]), c.d, f.d});
    for (const PairRun* r : {&c, &f}) {
      if (!r->error.empty()) {
        failed = true;
        if (!v.diagnostic.empty()) v.diagnostic += "; ";
        v.diagnostic += describe(probes[p]) + ": " + r->error;
      }
    }
    if (c.error.empty()) v.worst_coarse = std::max(v.worst_coarse, c.d);
    if (f.error.empty()) v.worst_fine = std::max(v.worst_fine, f.d);
  }
  if (runs[0].error.empty()) {
    v.first_ab = std::move(runs[0].ab);
    v.first_ba = std::move(runs[0].ba);
  }

  if (failed) {
    v.worst_coarse = v.worst_fine = std::numeric_limits<double>::quiet_NaN();
    v.decision = Decision::Inconclusive;
  } else if (v.worst_coarse < thresholds.pass && v.worst_fine < thresholds.pass) {
    v.decision = Decision::Commutative;
  } else if (v.worst_coarse > thresholds.fail && v.worst_fine > thresholds.fail) {
    v.decision = Decision::NotCommutative;
  } else {
    v.decision = Decision::Inconclusive;
  }
  return v;
}

StructuralResult structural_check_n1(const LtvSystem& a, const LtvSystem& b,
                                     std::span<const double> grid, double tau_const) {
  if (a.order() != 1 || b.order() != 1) {
    throw CommuteError(CommuteError::Kind::OrderMismatch, "structural_check_n1 needs two first-order systems");
  }
  if (grid.empty()) throw Error("structural_check_n1: empty grid");
  const auto a1 = sample(a.coeff(1), grid);
  const auto a0 = sample(a.coeff(0), grid);
  const auto b1 = sample(b.coeff(1), grid);
  const auto b0 = sample(b.coeff(0), grid);

  std::vector<double> c1(grid.size()), c0(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(std::abs(a1[k]) > kLeadingEpsilon)) {
      throw CommuteError(CommuteError::Kind::VanishingDivisor,
                         "a_1 vanishes at t=" + std::to_string(grid[k]));
    }
    c1[k] = b1[k] / a1[k];
  }
  const double c1_bar = mean_of(c1);
  for (std::size_t k = 0; k < grid.size(); ++k) c0[k] = b0[k] - a0[k] * c1_bar;

  StructuralResult r;
  r.constants = {c1_bar, mean_of(c0)};
  r.residuals = {constancy_measure(c1), constancy_measure(c0)};
  r.satisfied = std::ranges::all_of(r.residuals, [&](double x) { return x <= tau_const; });
  return r;
}

StructuralResult structural_check_n2(const LtvSystem& a, const LtvSystem& b,
                                     std::span<const double> grid, double tau_const) {
  if (a.order() != 2 || b.order() != 2) {
    throw CommuteError(CommuteError::Kind::OrderMismatch, "structural_check_n2 needs two second-order systems");
  }
  if (grid.empty()) throw Error("structural_check_n2: empty grid");
  auto a2 = sample(a.coeff(2), grid);
  auto a1 = sample(a.coeff(1), grid);
  auto a0 = sample(a.coeff(0), grid);
  auto a2_dot = sample(differentiate(a.coeff(2)), grid);
  auto b2 = sample(b.coeff(2), grid);
  auto b1 = sample(b.coeff(1), grid);
  auto b0 = sample(b.coeff(0), grid);

  StructuralResult r;
  const bool all_negative = std::ranges::all_of(a2, [](double v) { return v < -kLeadingEpsilon; });
  if (all_negative) {
    for (auto* row : {&a2, &a1, &a0, &a2_dot, &b2, &b1, &b0}) {
      for (double& v : *row) v = -v;
    }
    r.negated = true;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(a2[k] > kLeadingEpsilon)) {
      throw CommuteError(CommuteError::Kind::NonPositiveLeading,
                         "a_2 is not positive at t=" + std::to_string(grid[k]));
    }
  }

  const std::size_t n = grid.size();
  std::vector<double> root(n), c2(n), c1(n), c0(n);
  for (std::size_t k = 0; k < n; ++k) {
    root[k] = std::sqrt(a2[k]);
    c2[k] = b2[k] / a2[k];
  }
  const double c2_bar = mean_of(c2);
  for (std::size_t k = 0; k < n; ++k) c1[k] = (b1[k] - a1[k] * c2_bar) / root[k];
  const double c1_bar = mean_of(c1);
  for (std::size_t k = 0; k < n; ++k) {
    const double cross = (2.0 * a1[k] - a2_dot[k]) / (4.0 * root[k]);
    c0[k] = b0[k] - a0[k] * c2_bar - c1_bar * cross;
  }

  r.constants = {c2_bar, c1_bar, mean_of(c0)};
  r.residuals = {constancy_measure(c2), constancy_measure(c1), constancy_measure(c0)};
  r.satisfied = std::ranges::all_of(r.residuals, [&](double x) { return x <= tau_const; });
  return r;
}

GainConstancyResult theorem1_check(int base_order, const GainPair& gains,
                                   std::span<const double> grid, double tau_const) {
  if (base_order < 0) throw Error("theorem1_check: negative order");
  if (grid.empty()) throw Error("theorem1_check: empty grid");
  validate_gains(gains, grid);
  const auto alpha = sample(gains.alpha, grid);
  const auto beta = sample(gains.beta, grid);

  GainConstancyResult r;
  r.c_leading = 1.0 / mean_of(alpha);
  r.c_zero = mean_of(beta);
  r.alpha_residual = constancy_measure(alpha);
  r.beta_residual = constancy_measure(beta);
  if (base_order == 0) {
    r.decision = GainClass::AlwaysCommutative;
  } else if (r.alpha_residual <= tau_const && r.beta_residual <= tau_const) {
    r.decision = GainClass::Commutative;
  } else {
    r.decision = GainClass::NotCommutative;
  }
  return r;
}

RelationFit theorem2_fit(const GainPair& g1, const GainPair& g2, std::span<const double> grid,
                         double tau_const) {
  if (grid.empty()) throw Error("theorem2_fit: empty grid");
  validate_gains(g1, grid);
  validate_gains(g2, grid);
  const auto alpha1 = sample(g1.alpha, grid);
  const auto alpha2 = sample(g2.alpha, grid);
  const auto beta1 = sample(g1.beta, grid);
  const auto beta2 = sample(g2.beta, grid);

  double cross = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cross += alpha1[k] * alpha2[k];
    norm += alpha1[k] * alpha1[k];
  }
  if (!(norm > kLeadingEpsilon)) {
    throw CommuteError(CommuteError::Kind::DegenerateAlpha, "alpha_1 is numerically zero on the grid");
  }

  RelationFit fit;
  fit.p = cross / norm;

  double alpha_dev = 0.0, alpha_mag = 0.0, beta_mag = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    alpha_dev = std::max(alpha_dev, std::abs(alpha2[k] - fit.p * alpha1[k]));
    alpha_mag = std::max(alpha_mag, std::abs(alpha2[k]));
    beta_mag = std::max(beta_mag, std::abs(beta2[k]));
  }
  fit.alpha_residual = alpha_dev / (1.0 + alpha_mag);

  if (!(std::abs(fit.p) > kLeadingEpsilon)) {
    fit.q = kNaN;
    fit.beta_residual = std::numeric_limits<double>::infinity();
    fit.satisfied = false;
    return fit;
  }
  std::vector<double> offset(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) offset[k] = beta2[k] - beta1[k] / fit.p;
  fit.q = mean_of(offset);
  double beta_dev = 0.0;
  for (double o : offset) beta_dev = std::max(beta_dev, std::abs(o - fit.q));
  fit.beta_residual = beta_dev / (1.0 + beta_mag);
  fit.satisfied = fit.alpha_residual <= tau_const && fit.beta_residual <= tau_const;
  return fit;
}

}  // namespace ltvc
