#include <benchmark/benchmark.h>

#include "ltvc/battery.hpp"
#include "ltvc/sim.hpp"

using namespace ltvc;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

LtvSystem sys(std::vector<const char*> coeffs) {
  std::vector<Expr> e;
  for (const char* c : coeffs) e.push_back(parse(c));
  return make_system(std::move(e), {0.0, 5.0});
}

void BM_SampleOnStages(benchmark::State& state) {
  const StepGrid grid({0.0, 5.0}, 1e-4);
  const Expr e = parse("exp(0.2*t)*sin(3*t) + sqrt(1 + t^2)/(2 + cos(t))");
  for (auto _ : state) benchmark::DoNotOptimize(sample_on_stages(e, grid, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.stage_count()));
}
BENCHMARK(BM_SampleOnStages)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_CommuteCheck(benchmark::State& state) {
  const LtvSystem a = sys({"t+1", "2+sin(t)", "1"});
  const LtvSystem b = feedback_conjugate(a, GainPair{parse("2"), parse("1")});
  SolverOptions opts;
  opts.execution = mode(state);
  const auto probes = default_probes({0.0, 5.0});
  for (auto _ : state) benchmark::DoNotOptimize(numerical_commute_check(a, b, probes, opts));
}
BENCHMARK(BM_CommuteCheck)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Battery(benchmark::State& state) {
  const LtvSystem base = sys({"1", "t+1", "2+sin(t)", "1"});
  std::vector<BatteryCase> cases;
  for (const char* alpha : {"0.5", "2", "1+0.5*sin(t)", "1+0.1*t"}) {
    cases.push_back({alpha, base, feedback_conjugate(base, GainPair{parse(alpha), parse("1")})});
  }
  SolverOptions opts;
  opts.step = 2e-3;
  const auto probes = default_probes({0.0, 5.0});
  for (auto _ : state) benchmark::DoNotOptimize(run_battery(cases, probes, opts, {}, mode(state)));
}
BENCHMARK(BM_Battery)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
