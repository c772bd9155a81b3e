#include "ltvc/battery.hpp"

namespace ltvc {

std::vector<Verdict> run_battery(const std::vector<BatteryCase>& cases,
                                 const std::vector<Signal>& probes, const SolverOptions& opts,
                                 const Thresholds& thresholds, Execution exec) {
  SolverOptions inner = opts;
  inner.execution = Execution::Serial;
  std::vector<Verdict> verdicts(cases.size());
  for_each_index(cases.size(), exec, [&](std::size_t i) {
    verdicts[i] = numerical_commute_check(cases[i].a, cases[i].b, probes, inner, thresholds);
  });
  return verdicts;
}

}  // namespace ltvc
