#pragma once

#include <string>
#include <vector>

#include "ltvc/commute.hpp"

namespace ltvc {

/// One pair of systems to be checked for commutativity.
struct BatteryCase {
  std::string label;
  LtvSystem a;
  LtvSystem b;
};

/// Runs numerical_commute_check on every case. With Execution::Parallel
/// the cases are distributed over OpenMP threads and each check runs
/// serially; the verdicts are bit-identical to the serial run.
std::vector<Verdict> run_battery(const std::vector<BatteryCase>& cases,
                                 const std::vector<Signal>& probes, const SolverOptions& opts,
                                 const Thresholds& thresholds, Execution exec);

}  // namespace ltvc
