#include <atomic>
#include <stdexcept>

#include "doctest.h"
#include "ltvc/battery.hpp"
#include "ltvc/parallel.hpp"
#include "support.hpp"

using namespace ltvc;
using test::gains_of;
using test::system_of;

TEST_SUITE("parallel") {
  TEST_CASE("for_each_index visits every index once") {
    std::vector<int> hits(1000, 0);
    for_each_index(hits.size(), Execution::Parallel, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }

  TEST_CASE("for_each_index rethrows the lowest failing index") {
    std::atomic<int> ran{0};
    auto body = [&](std::size_t i) {
      ++ran;
      if (i == 7 || i == 40) throw std::runtime_error("boom " + std::to_string(i));
    };
    for (Execution exec : {Execution::Serial, Execution::Parallel}) {
      try {
        for_each_index(64, exec, body);
        FAIL("expected an exception");
      } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "boom 7");
      }
    }
    CHECK(available_threads() >= 1);
  }

  TEST_CASE("stage sampling is bit-identical serial vs parallel") {
    const StepGrid grid({0.0, 5.0}, 1e-3);
    const Expr e = parse("exp(0.2*t)*sin(3*t) + sqrt(1 + t^2)");
    CHECK(sample_on_stages(e, grid, Execution::Serial) == sample_on_stages(e, grid, Execution::Parallel));
    for (const Signal& s : default_probes({0.0, 5.0})) {
      CHECK(sample_on_stages(s, grid, Execution::Serial) == sample_on_stages(s, grid, Execution::Parallel));
    }
  }

  TEST_CASE("stage sampling propagates evaluation errors") {
    const StepGrid grid({0.0, 5.0}, 1e-2);
    CHECK_THROWS_AS(sample_on_stages(parse("ln(t - 2)"), grid, Execution::Parallel), EvalError);
  }

  TEST_CASE("commute check and battery are bit-identical serial vs parallel") {
    const LtvSystem a = system_of({"1+t", "2+sin(t)", "1"});
    std::vector<BatteryCase> cases = {
        {"const", a, feedback_conjugate(a, gains_of("2", "1"))},
        {"varying", a, feedback_conjugate(a, gains_of("1+0.5*sin(t)", "0"))},
        {"blow-up", a, system_of({"-20", "1"})},
    };
    const auto probes = default_probes({0.0, 5.0});
    SolverOptions serial;
    serial.step = 2e-3;
    serial.execution = Execution::Serial;
    SolverOptions parallel = serial;
    parallel.execution = Execution::Parallel;

    const Verdict vs = numerical_commute_check(cases[1].a, cases[1].b, probes, serial);
    const Verdict vp = numerical_commute_check(cases[1].a, cases[1].b, probes, parallel);
    CHECK(vs.worst_coarse == vp.worst_coarse);
    CHECK(vs.worst_fine == vp.worst_fine);
    CHECK(vs.first_ab.y == vp.first_ab.y);

    const auto bs = run_battery(cases, probes, serial, {}, Execution::Serial);
    const auto bp = run_battery(cases, probes, serial, {}, Execution::Parallel);
    REQUIRE(bs.size() == bp.size());
    for (std::size_t i = 0; i < bs.size(); ++i) {
      CHECK(bs[i].decision == bp[i].decision);
      CHECK(bs[i].diagnostic == bp[i].diagnostic);
      for (std::size_t k = 0; k < bs[i].probes.size(); ++k) {
        const auto& ps = bs[i].probes[k];
        const auto& pp = bp[i].probes[k];
        CHECK((ps.coarse == pp.coarse || (std::isnan(ps.coarse) && std::isnan(pp.coarse))));
        CHECK((ps.fine == pp.fine || (std::isnan(ps.fine) && std::isnan(pp.fine))));
      }
    }
    CHECK(bs[2].decision == Decision::Inconclusive);
  }
}
