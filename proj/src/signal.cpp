#include "ltvc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ltvc {

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
  if (knots_.empty()) throw Error("piecewise-linear signal needs at least one knot");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].first > knots_[i - 1].first)) {
      throw Error("piecewise-linear knot times must be strictly increasing");
    }
  }
}

double PiecewiseLinear::operator()(double t) const {
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const auto& k) { return v < k.first; });
  auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

namespace {

struct Evaluator {
  double t;
  const Domain& domain;

  double operator()(const UnitStep&) const { return t >= domain.t0 ? 1.0 : 0.0; }
  double operator()(const Sinusoid& s) const {
    return s.amplitude * std::sin(s.omega * t + s.phase);
  }
  double operator()(const Chirp& c) const {
    const double tau = t - domain.t0;
    const double rate = (c.f1 - c.f0) / domain.span();
    return c.amplitude * std::sin(2.0 * std::numbers::pi * (c.f0 * tau + 0.5 * rate * tau * tau));
  }
  double operator()(const PiecewiseLinear& p) const { return p(t); }
  double operator()(const Analytic& a) const { return eval(a.expr, t); }
};

struct Describer {
  std::string operator()(const UnitStep&) const { return "step"; }
  std::string operator()(const Sinusoid& s) const {
    std::ostringstream os;
    os << "sinusoid(A=" << s.amplitude << ", w=" << s.omega << ", phase=" << s.phase << ")";
    return os.str();
  }
  std::string operator()(const Chirp& c) const {
    std::ostringstream os;
    os << "chirp(A=" << c.amplitude << ", " << c.f0 << "->" << c.f1 << " Hz)";
    return os.str();
  }
  std::string operator()(const PiecewiseLinear& p) const {
    return "piecewise-linear(" + std::to_string(p.knots().size()) + " knots)";
  }
  std::string operator()(const Analytic& a) const { return "analytic(" + to_string(a.expr) + ")"; }
};

}  // namespace

double evaluate(const Signal& signal, double t, const Domain& domain) {
  return std::visit(Evaluator{t, domain}, signal);
}

std::string describe(const Signal& signal) { return std::visit(Describer{}, signal); }

std::vector<Signal> default_probes(const Domain& domain) {
  const double ramp_end = domain.t0 + 0.4 * domain.span();
  return {
      UnitStep{},
      Sinusoid{1.0, 2.0, 0.0},
      Chirp{1.0, 0.1, 2.0},
      PiecewiseLinear({{domain.t0, 0.0}, {ramp_end, 1.0}, {domain.t1, 1.0}}),
  };
}

}  // namespace ltvc
