#include <cmath>
#include <random>

#include "doctest.h"
#include "ltvc/battery.hpp"
#include "ltvc/commute.hpp"
#include "support.hpp"

using namespace ltvc;
using test::gains_of;
using test::system_of;

namespace {

SolverOptions options(double h = 1e-3) {
  SolverOptions o;
  o.step = h;
  return o;
}

const std::vector<Signal>& probes() {
  static const std::vector<Signal> p = default_probes({0.0, 5.0});
  return p;
}

Decision decide(const LtvSystem& a, const LtvSystem& b, double h = 1e-3) {
  return numerical_commute_check(a, b, probes(), options(h)).decision;
}

const std::vector<double>& grid() {
  static const std::vector<double> g = uniform_grid({0.0, 5.0});
  return g;
}

constexpr double kTau = 1e-6;

}  // namespace

TEST_SUITE("commute") {
  TEST_CASE("constancy_measure examples") {
    CHECK(constancy_measure(std::vector<double>{5, 5, 5}) == 0.0);
    CHECK(constancy_measure(std::vector<double>{0, 2}) == 0.5);
    std::vector<double> s;
    for (double t : grid()) s.push_back(std::sin(t));
    CHECK(constancy_measure(s) > 0.3);
    CHECK_THROWS(constancy_measure(std::vector<double>{}));
  }

  TEST_CASE("identical systems commute with zero discrepancy") {
    const LtvSystem a = system_of({"t", "1"});
    const Verdict v = numerical_commute_check(a, a, probes(), options());
    CHECK(v.decision == Decision::Commutative);
    CHECK(v.worst() == 0.0);
    CHECK(v.probes.size() == 4);
    CHECK(v.step_fine == doctest::Approx(v.step_coarse / 2));
    CHECK(v.first_ab.y.size() == 5001);
  }

  TEST_CASE("constant-gain conjugate commutes; time-varying forward gain does not") {
    const LtvSystem a = system_of({"t", "1"});
    CHECK(decide(a, feedback_conjugate(a, gains_of("2", "1"))) == Decision::Commutative);

    const LtvSystem a2 = system_of({"1+t", "1"});
    const Verdict v = numerical_commute_check(
        a2, feedback_conjugate(a2, gains_of("1 + 0.5*sin(t)", "1")), probes(), options());
    CHECK(v.decision == Decision::NotCommutative);
    CHECK(v.worst_coarse > 1e-3);
    CHECK(v.worst_fine > 1e-3);
  }

  TEST_CASE("blow-up makes the verdict Inconclusive with a diagnostic") {
    const LtvSystem a = system_of({"1", "1"});
    const LtvSystem unstable = system_of({"-20", "1"});
    const Verdict v = numerical_commute_check(a, unstable, probes(), options());
    CHECK(v.decision == Decision::Inconclusive);
    CHECK(v.diagnostic.find("exceeded") != std::string::npos);
    CHECK(std::isnan(v.probes[0].coarse));
    CHECK(std::isnan(v.worst()));
  }

  TEST_CASE("thresholds define the Inconclusive band") {
    const LtvSystem a = system_of({"1+t", "1"});
    const LtvSystem b = feedback_conjugate(a, gains_of("1 + 0.5*sin(t)", "1"));
    Thresholds loose;
    loose.fail = 1.0;  // nothing can exceed it
    const Verdict v = numerical_commute_check(a, b, probes(), options(), loose);
    CHECK(v.decision == Decision::Inconclusive);
  }

  TEST_CASE("structural_check_n1 examples") {
    const LtvSystem a = system_of({"t", "1"});
    const StructuralResult r = structural_check_n1(a, system_of({"2*t+5", "2"}), grid(), kTau);
    CHECK(r.satisfied);
    CHECK(r.constants[0] == doctest::Approx(2.0));
    CHECK(r.constants[1] == doctest::Approx(5.0));
    CHECK(decide(a, system_of({"2*t+5", "2"})) == Decision::Commutative);

    const StructuralResult same = structural_check_n1(a, a, grid(), kTau);
    CHECK(same.satisfied);
    CHECK(same.constants == std::vector<double>{1.0, 0.0});

    const StructuralResult bad = structural_check_n1(a, system_of({"0", "t+1"}), grid(), kTau);
    CHECK_FALSE(bad.satisfied);
    CHECK(bad.residuals[0] > kTau);
  }

  TEST_CASE("structural_check_n1 errors") {
    const LtvSystem a1 = system_of({"t", "1"});
    const LtvSystem a2 = system_of({"t", "1", "1"});
    try {
      structural_check_n1(a1, a2, grid(), kTau);
      FAIL("expected OrderMismatch");
    } catch (const CommuteError& e) {
      CHECK(e.kind() == CommuteError::Kind::OrderMismatch);
    }
    const LtvSystem shifted = system_of({"1", "t - 1.0005"});
    try {
      structural_check_n1(shifted, a1, std::vector<double>{0.5, 1.0005}, kTau);
      FAIL("expected VanishingDivisor");
    } catch (const CommuteError& e) {
      CHECK(e.kind() == CommuteError::Kind::VanishingDivisor);
    }
  }

  TEST_CASE("structural_check_n2 worked examples") {
    const LtvSystem a = system_of({"0", "t", "1"});
    const StructuralResult r = structural_check_n2(a, system_of({"t+3", "t+2", "1"}), grid(), kTau);
    CHECK(r.satisfied);
    CHECK(r.constants[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.constants[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.constants[2] == doctest::Approx(3.0).epsilon(1e-12));
    for (double res : r.residuals) CHECK(res < 1e-9);

    const StructuralResult same = structural_check_n2(a, a, grid(), kTau);
    CHECK(same.satisfied);
    CHECK(same.constants[0] == doctest::Approx(1.0));
    CHECK(std::abs(same.constants[1]) < 1e-12);
    CHECK(std::abs(same.constants[2]) < 1e-12);

    // b0 = t: c0(t) = t - 0 - 2*(2t)/4 = 0.
    const StructuralResult zero_c0 = structural_check_n2(a, system_of({"t", "t+2", "1"}), grid(), kTau);
    CHECK(zero_c0.satisfied);
    CHECK(zero_c0.constants[1] == doctest::Approx(2.0));
    CHECK(std::abs(zero_c0.constants[2]) < 1e-12);
  }

  TEST_CASE("structural_check_n2 is necessary, not sufficient") {
    // Time-invariant pair with c1 != 0 commutes and satisfies the condition.
    const LtvSystem a = system_of({"1", "2", "1"});
    const LtvSystem b = system_of({"2", "3", "1"});  // a + (D + 1)
    CHECK(structural_check_n2(a, b, grid(), kTau).satisfied);
    CHECK(decide(a, b) == Decision::Commutative);

    // The worked time-varying pair satisfies it too, yet the cascades differ:
    // with S = D + t/2, [S, D^2 + t D] = -t/2, so the pair is not commutative.
    const LtvSystem tv = system_of({"0", "t", "1"});
    const LtvSystem tvb = system_of({"t+3", "t+2", "1"});
    CHECK(structural_check_n2(tv, tvb, grid(), kTau).satisfied);
    CHECK(decide(tv, tvb) == Decision::NotCommutative);
  }

  TEST_CASE("structural_check_n2 negates an everywhere-negative pair") {
    const LtvSystem a = system_of({"0", "-t", "-1"});
    const LtvSystem b = system_of({"-t-3", "-t-2", "-1"});
    const StructuralResult r = structural_check_n2(a, b, grid(), kTau);
    CHECK(r.negated);
    CHECK(r.satisfied);
    CHECK(r.constants[1] == doctest::Approx(2.0));
    CHECK(r.constants[2] == doctest::Approx(3.0));
  }

  TEST_CASE("structural_check_n2 errors") {
    const LtvSystem sign_change = system_of({"0", "t", "t - 1.0025"});
    const LtvSystem b = system_of({"0", "t", "1"});
    try {
      structural_check_n2(sign_change, b, grid(), kTau);
      FAIL("expected NonPositiveLeading");
    } catch (const CommuteError& e) {
      CHECK(e.kind() == CommuteError::Kind::NonPositiveLeading);
    }
    CHECK_THROWS_AS(structural_check_n2(system_of({"t", "1"}), b, grid(), kTau), CommuteError);
  }

  TEST_CASE("theorem1_check examples") {
    const GainConstancyResult c = theorem1_check(2, gains_of("2", "3"), grid(), kTau);
    CHECK(c.decision == GainClass::Commutative);
    CHECK(c.c_leading == 0.5);
    CHECK(c.c_zero == 3.0);

    CHECK(theorem1_check(1, gains_of("1 + 0.5*sin(t)", "1"), grid(), kTau).decision ==
          GainClass::NotCommutative);
    CHECK(theorem1_check(1, gains_of("1", "0.5*t"), grid(), kTau).decision == GainClass::NotCommutative);
    CHECK(theorem1_check(0, gains_of("t + 1", "0"), grid(), kTau).decision == GainClass::AlwaysCommutative);
    CHECK_THROWS_AS(theorem1_check(1, gains_of("t", "0"), grid(), kTau), SystemError);
  }

  TEST_CASE("theorem2_fit examples") {
    const GainPair g1 = gains_of("1+t^2", "sin(t)");
    const RelationFit fit = theorem2_fit(g1, gains_of("3*(1+t^2)", "sin(t)/3 + 5"), grid(), kTau);
    CHECK(fit.satisfied);
    CHECK(fit.p == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.q == doctest::Approx(5.0).epsilon(1e-12));

    const RelationFit same = theorem2_fit(g1, g1, grid(), kTau);
    CHECK(same.satisfied);
    CHECK(same.p == doctest::Approx(1.0));
    CHECK(std::abs(same.q) < 1e-12);

    // Literal p*beta1 + q form.
    const RelationFit literal = theorem2_fit(g1, gains_of("3*(1+t^2)", "3*sin(t) + 5"), grid(), kTau);
    CHECK_FALSE(literal.satisfied);
    CHECK(literal.alpha_residual < 1e-12);
    CHECK(literal.beta_residual > 0.1);

    try {
      theorem2_fit(gains_of("1e-8", "0"), g1, grid(), kTau);
      FAIL("expected DegenerateAlpha");
    } catch (const CommuteError& e) {
      CHECK(e.kind() == CommuteError::Kind::DegenerateAlpha);
    }
  }

  TEST_CASE("gain relation with beta1/p commutes, with p*beta1 it does not") {
    const LtvSystem a = system_of({"1+t", "1"});
    const GainPair g1 = gains_of("1+t^2", "sin(t)");
    const LtvSystem b1 = feedback_conjugate(a, g1);
    CHECK(decide(b1, feedback_conjugate(a, gains_of("3*(1+t^2)", "sin(t)/3 + 5"))) == Decision::Commutative);
    CHECK(decide(b1, feedback_conjugate(a, gains_of("3*(1+t^2)", "3*sin(t) + 5"))) ==
          Decision::NotCommutative);
  }

  TEST_CASE("property: constant gains commute for orders 1-3") {
    const LtvSystem bases[] = {
        system_of({"t", "1"}),
        system_of({"t+1", "2+sin(t)", "1"}),
        system_of({"1", "t+1", "2+sin(t)", "1"}),
    };
    std::vector<BatteryCase> cases;
    for (const auto& base : bases) {
      for (const char* alpha : {"0.5", "-0.5", "1", "2"}) {
        for (const char* beta : {"0", "1", "-1"}) {
          cases.push_back({alpha, base, feedback_conjugate(base, gains_of(alpha, beta))});
        }
      }
    }
    const auto verdicts = run_battery(cases, probes(), options(2e-3), {}, Execution::Parallel);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      INFO("case ", i);
      CHECK(verdicts[i].decision == Decision::Commutative);
    }
  }

  TEST_CASE("property: time-varying gains never commute") {
    const LtvSystem bases[] = {
        system_of({"t", "1"}),
        system_of({"t+1", "2+sin(t)", "1"}),
        system_of({"1", "t+1", "2+sin(t)", "1"}),
    };
    std::vector<BatteryCase> cases;
    for (const auto& base : bases) {
      for (const char* alpha : {"1+0.5*sin(t)", "1+t", "exp(0.2*t)"}) {
        cases.push_back({alpha, base, feedback_conjugate(base, gains_of(alpha, "1"))});
      }
      for (const char* beta : {"sin(t)", "t"}) {
        cases.push_back({beta, base, feedback_conjugate(base, gains_of("2", beta))});
      }
    }
    const auto verdicts = run_battery(cases, probes(), options(2e-3), {}, Execution::Parallel);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      INFO("case ", i, " ", cases[i].label);
      CHECK(verdicts[i].decision == Decision::NotCommutative);
    }
  }

  TEST_CASE("property: related conjugate pairs commute, perturbed ones do not") {
    const LtvSystem a = system_of({"1+t", "1"});
    const GainPair g1 = gains_of("1+t^2", "sin(t)");
    const LtvSystem b1 = feedback_conjugate(a, g1);
    for (double p : {0.5, 3.0}) {
      for (double q : {0.0, 5.0}) {
        const Expr P = Expr::constant(p), Q = Expr::constant(q);
        const GainPair g2{P * g1.alpha, g1.beta / P + Q};
        CHECK(decide(b1, feedback_conjugate(a, g2), 2e-3) == Decision::Commutative);
        CHECK(theorem2_fit(g1, g2, grid(), kTau).satisfied);

        const Expr bump = parse("0.1*t");
        const GainPair alpha_broken{g2.alpha + bump, g2.beta};
        const GainPair beta_broken{g2.alpha, g2.beta + bump};
        CHECK(decide(b1, feedback_conjugate(a, alpha_broken), 2e-3) != Decision::Commutative);
        CHECK(decide(b1, feedback_conjugate(a, beta_broken), 2e-3) != Decision::Commutative);
        CHECK_FALSE(theorem2_fit(g1, alpha_broken, grid(), kTau).satisfied);
        CHECK_FALSE(theorem2_fit(g1, beta_broken, grid(), kTau).satisfied);
      }
    }
  }

  TEST_CASE("property: commuting second-order pairs satisfy the structural condition") {
    const LtvSystem bases[] = {
        system_of({"t+1", "2+sin(t)", "1"}),
        system_of({"1", "t+1", "1+t^2"}),
    };
    for (const auto& base : bases) {
      for (const char* alpha : {"0.5", "2", "-1"}) {
        for (const char* beta : {"0", "1"}) {
          const LtvSystem b = feedback_conjugate(base, gains_of(alpha, beta));
          REQUIRE(decide(base, b, 2e-3) == Decision::Commutative);
          const StructuralResult r = structural_check_n2(base, b, grid(), kTau);
          CHECK(r.satisfied);
          CHECK(r.constants[0] == doctest::Approx(1.0 / std::stod(alpha)));
          CHECK(std::abs(r.constants[1]) < 1e-9);
          CHECK(r.constants[2] == doctest::Approx(std::stod(beta)));
        }
      }
    }
  }

  TEST_CASE("property: time-varying systems never commute with time-invariant ones") {
    std::mt19937 rng(1977);
    std::uniform_real_distribution<double> coef(0.5, 3.0), wobble(0.3, 0.6), slope(0.3, 1.0);
    std::uniform_int_distribution<int> order(1, 2);
    for (int i = 0; i < 6; ++i) {
      const int n = order(rng);
      std::vector<std::string> ca, cb;
      for (int k = 0; k <= n; ++k) {
        const std::string c = std::to_string(coef(rng));
        ca.push_back(k == n ? "1 + " + std::to_string(wobble(rng)) + "*sin(t)" : c + " + " + std::to_string(slope(rng)) + "*t");
        cb.push_back(std::to_string(coef(rng)));
      }
      INFO("A=", ca.back(), " ... order ", n);
      CHECK(decide(system_of(ca), system_of(cb), 2e-3) == Decision::NotCommutative);
    }
  }

  TEST_CASE("property: scaling a system leaves the decision unchanged") {
    const LtvSystem a = system_of({"t", "1"});
    const LtvSystem scaled = system_of({"3*t", "3"});
    const LtvSystem c = feedback_conjugate(a, gains_of("2", "1"));
    const LtvSystem d = feedback_conjugate(a, gains_of("1+0.5*sin(t)", "1"));
    CHECK(decide(a, c, 2e-3) == decide(scaled, c, 2e-3));
    CHECK(decide(a, d, 2e-3) == decide(scaled, d, 2e-3));
    CHECK(decide(scaled, d, 2e-3) == Decision::NotCommutative);
  }
}
