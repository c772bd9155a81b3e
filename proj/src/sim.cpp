#include "ltvc/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace ltvc {

StepGrid::StepGrid(const Domain& domain, double requested_step) : domain_(domain), steps_(0) {
  if (!(requested_step > 0.0) || !std::isfinite(requested_step)) {
    throw SimulationError(SimulationError::Kind::InvalidStep, "step must be positive and finite");
  }
  if (!(domain.span() > 0.0)) {
    throw SimulationError(SimulationError::Kind::InvalidStep, "domain is empty");
  }
  const double ratio = domain.span() / requested_step;
  const double nearest = std::round(ratio);
  const double n = std::abs(ratio - nearest) <= 1e-9 * nearest ? nearest : std::ceil(ratio);
  if (n < 10.0) {
    throw SimulationError(SimulationError::Kind::InvalidStep,
                          "step " + std::to_string(requested_step) +
                              " gives fewer than 10 steps over the domain");
  }
  steps_ = static_cast<std::size_t>(n);
}

double StepGrid::stage_time(std::size_t j) const noexcept {
  if (j == stage_count() - 1) return domain_.t1;
  return domain_.t0 + domain_.span() * (static_cast<double>(j) / static_cast<double>(2 * steps_));
}

StepGrid StepGrid::refined(int factor) const {
  if (factor < 1) throw SimulationError(SimulationError::Kind::InvalidStep, "refinement factor must be >= 1");
  return StepGrid(domain_, steps_ * static_cast<std::size_t>(factor));
}

namespace {

template <class Coeff>
inline void companion(int order, Coeff&& a, const double* z, double x, double* dz) {
  double acc = x;
  for (int n = 0; n < order; ++n) {
    acc -= a(n) * z[n];
    if (n + 1 < order) dz[n] = z[n + 1];
  }
  dz[order - 1] = acc / a(order);
}

// Coefficients of one system sampled at every stage point.
struct SampledSystem {
  int order = 0;
  std::vector<std::vector<double>> rows;

  double at(int n, std::size_t j) const { return rows[static_cast<std::size_t>(n)][j]; }
};

SampledSystem sample_system(const LtvSystem& sys, const StepGrid& grid, Execution exec) {
  SampledSystem s;
  s.order = sys.order();
  s.rows.reserve(sys.coeffs().size());
  for (const Expr& c : sys.coeffs()) s.rows.push_back(sample_on_stages(c, grid, exec));
  return s;
}

[[noreturn]] void blow_up(double t) {
  char msg[96];
  std::snprintf(msg, sizeof msg, "state exceeded %g at t=%g", kBlowUpThreshold, t);
  throw SimulationError(SimulationError::Kind::NonFiniteState, msg, t);
}

inline bool out_of_range(double v) { return !(std::abs(v) <= kBlowUpThreshold); }

// Classical RK4 over the grid. rhs(j, z, dz) evaluates at stage point j;
// output(k, z) yields y at grid point k.
template <class Rhs, class Output>
Trace integrate(const StepGrid& grid, std::size_t dim, const std::vector<double>& input,
                Rhs&& rhs, Output&& output) {
  const std::size_t n = grid.steps();
  const double h = grid.step();
  Trace trace;
  trace.state_dim = static_cast<int>(dim);
  trace.t.resize(n + 1);
  trace.x.resize(n + 1);
  trace.y.resize(n + 1);

  std::vector<double> z(dim, 0.0), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto record = [&](std::size_t k) {
    trace.t[k] = grid.time(k);
    trace.x[k] = input[2 * k];
    const double y = output(k, z.data());
    if (out_of_range(y)) blow_up(trace.t[k]);
    trace.y[k] = y;
  };

  record(0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = 2 * k;
    if (dim > 0) {
      rhs(j, z.data(), k1.data());
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
      rhs(j + 1, tmp.data(), k2.data());
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
      rhs(j + 1, tmp.data(), k3.data());
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = z[i] + h * k3[i];
      rhs(j + 2, tmp.data(), k4.data());
      for (std::size_t i = 0; i < dim; ++i) {
        z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (out_of_range(z[i])) blow_up(grid.time(k + 1));
      }
    }
    record(k + 1);
  }
  return trace;
}

void require_same_domain(const LtvSystem& a, const LtvSystem& b) {
  if (!(a.domain() == b.domain())) {
    throw SimulationError(SimulationError::Kind::DomainMismatch,
                          "systems are defined on different domains");
  }
}

}  // namespace

void StateForm::derivative(double t, std::span<const double> z, double x,
                           std::span<double> dz) const {
  const int order = sys_.order();
  if (order < 1) throw Error("StateForm::derivative: order-0 systems are algebraic");
  if (z.size() != static_cast<std::size_t>(order) || dz.size() != z.size()) {
    throw Error("StateForm::derivative: state length must equal the system order");
  }
  std::array<double, 16> small{};
  std::vector<double> large;
  double* a = small.data();
  if (sys_.coeffs().size() > small.size()) {
    large.resize(sys_.coeffs().size());
    a = large.data();
  }
  for (int n = 0; n <= order; ++n) a[n] = eval(sys_.coeff(n), t);
  companion(order, [a](int n) { return a[n]; }, z.data(), x, dz.data());
}

std::vector<double> StateForm::derivative(double t, std::span<const double> z, double x) const {
  std::vector<double> dz(z.size());
  derivative(t, z, x, dz);
  return dz;
}

double StateForm::algebraic_output(double t, double x) const {
  if (sys_.order() != 0) throw Error("StateForm::algebraic_output: system is not order 0");
  return x / eval(sys_.coeff(0), t);
}

StateForm to_state_form(const LtvSystem& sys) { return StateForm(sys); }

std::vector<double> sample_on_stages(const Expr& e, const StepGrid& grid, Execution exec) {
  std::vector<double> out(grid.stage_count());
  for_each_index(out.size(), exec, [&](std::size_t j) { out[j] = eval(e, grid.stage_time(j)); });
  return out;
}

std::vector<double> sample_on_stages(const Signal& s, const StepGrid& grid, Execution exec) {
  std::vector<double> out(grid.stage_count());
  for_each_index(out.size(), exec,
                 [&](std::size_t j) { out[j] = evaluate(s, grid.stage_time(j), grid.domain()); });
  return out;
}

Trace simulate(const LtvSystem& sys, const Signal& input, const SolverOptions& opts) {
  const StepGrid grid(sys.domain(), opts.step);
  const auto x = sample_on_stages(input, grid, opts.execution);
  const auto a = sample_system(sys, grid, opts.execution);
  const int order = a.order;
  auto coeff = [&a](std::size_t j) { return [&a, j](int n) { return a.at(n, j); }; };

  if (order == 0) {
    return integrate(
        grid, 0, x, [](std::size_t, const double*, double*) {},
        [&](std::size_t k, const double*) { return x[2 * k] / a.at(0, 2 * k); });
  }
  return integrate(
      grid, static_cast<std::size_t>(order), x,
      [&](std::size_t j, const double* z, double* dz) { companion(order, coeff(j), z, x[j], dz); },
      [](std::size_t, const double* z) { return z[0]; });
}

Trace simulate_cascade(const LtvSystem& first, const LtvSystem& second, const Signal& input,
                       const SolverOptions& opts) {
  require_same_domain(first, second);
  const StepGrid grid(first.domain(), opts.step);
  const auto x = sample_on_stages(input, grid, opts.execution);
  const auto a = sample_system(first, grid, opts.execution);
  const auto b = sample_system(second, grid, opts.execution);
  const int na = a.order;
  const int nb = b.order;
  const std::size_t dim = static_cast<std::size_t>(na + nb);

  // Output of `first` at stage j given the joint state.
  auto first_output = [&](std::size_t j, const double* z) {
    return na > 0 ? z[0] : x[j] / a.at(0, j);
  };

  auto rhs = [&](std::size_t j, const double* z, double* dz) {
    const double ya = first_output(j, z);
    if (na > 0) companion(na, [&](int n) { return a.at(n, j); }, z, x[j], dz);
    if (nb > 0) companion(nb, [&](int n) { return b.at(n, j); }, z + na, ya, dz + na);
  };
  auto output = [&](std::size_t k, const double* z) {
    const std::size_t j = 2 * k;
    if (nb > 0) return z[na];
    return first_output(j, z) / b.at(0, j);
  };
  return integrate(grid, dim, x, rhs, output);
}

Trace simulate_closed_loop(const LtvSystem& base, const GainPair& gains, const Signal& input,
                           const SolverOptions& opts) {
  validate_gains(gains, base.domain());
  const StepGrid grid(base.domain(), opts.step);
  const auto x = sample_on_stages(input, grid, opts.execution);
  const auto a = sample_system(base, grid, opts.execution);
  const auto alpha = sample_on_stages(gains.alpha, grid, opts.execution);
  const auto beta = sample_on_stages(gains.beta, grid, opts.execution);
  const int order = a.order;

  if (order == 0) {
    // a0 y = alpha (x - beta y)
    return integrate(
        grid, 0, x, [](std::size_t, const double*, double*) {},
        [&](std::size_t k, const double*) {
          const std::size_t j = 2 * k;
          return alpha[j] * x[j] / (a.at(0, j) + alpha[j] * beta[j]);
        });
  }
  return integrate(
      grid, static_cast<std::size_t>(order), x,
      [&](std::size_t j, const double* z, double* dz) {
        const double drive = alpha[j] * (x[j] - beta[j] * z[0]);
        companion(order, [&](int n) { return a.at(n, j); }, z, drive, dz);
      },
      [](std::size_t, const double* z) { return z[0]; });
}

double discrepancy(const Trace& a, const Trace& b) {
  if (a.t.size() != b.t.size() || a.y.size() != b.y.size() || a.y.size() != a.t.size()) {
    throw SimulationError(SimulationError::Kind::GridMismatch, "traces have different lengths");
  }
  double max_diff = 0.0;
  double max_mag = 0.0;
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    if (std::abs(a.t[k] - b.t[k]) > 1e-12 * (1.0 + std::abs(a.t[k]))) {
      throw SimulationError(SimulationError::Kind::GridMismatch, "traces sampled on different grids");
    }
    max_diff = std::max(max_diff, std::abs(a.y[k] - b.y[k]));
    max_mag = std::max({max_mag, std::abs(a.y[k]), std::abs(b.y[k])});
  }
  return max_diff / (1.0 + max_mag);
}

void write_trace_csv(const Trace& trace, std::ostream& os) {
  os << "t,x,y\n";
  char line[128];
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", trace.t[k], trace.x[k], trace.y[k]);
    os << line;
  }
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_trace_csv(trace, os);
  if (!os) throw Error("failed writing " + path);
}

}  // namespace ltvc
