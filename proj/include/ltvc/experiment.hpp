#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ltvc/commute.hpp"
#include "ltvc/signal.hpp"
#include "ltvc/sim.hpp"
#include "ltvc/systems.hpp"

namespace ltvc {

inline constexpr const char* kToolName = "ltvc";
inline constexpr const char* kToolVersion = "0.1.0";

enum class ExperimentKind {
  Simulate,
  Cascade,
  ClosedLoop,
  Commute,
  StructuralN1,
  StructuralN2,
  Theorem1,
  Theorem2,
  Conjugate,
};

std::string to_string(ExperimentKind k);

/// One configured experiment. Which references are used depends on kind:
///   simulate      system, signal
///   cascade       system (first), second, signal
///   closed-loop   system, gains, signal
///   commute       system (A), second (B), probes (optional)
///   structural-*  system (A), second (B)
///   theorem1      system, gains
///   theorem2      gains, gains2, system (optional, for the domain)
///   conjugate     system, gains
struct Experiment {
  std::string id;
  ExperimentKind kind = ExperimentKind::Simulate;
  std::string system;
  std::string second;
  std::string gains;
  std::string gains2;
  std::string signal;
  std::vector<std::string> probes;
};

struct ExperimentConfig {
  SolverOptions solver;
  Domain domain;
  std::size_t grid_points = kValidationGridPoints;
  Thresholds thresholds;
  std::map<std::string, LtvSystem> systems;
  std::map<std::string, GainPair> gains;
  std::map<std::string, Signal> signals;
  std::vector<Experiment> experiments;
  /// SHA-256 of the effective (override-applied) document, canonical form.
  std::string digest;
};

/// Command-line overrides applied before validation.
struct ConfigOverrides {
  std::optional<double> step;
  /// Replaces the default domain and every system's explicit domain.
  std::optional<Domain> domain;
};

class ConfigError : public Error {
 public:
  enum class Kind { File, Parse, Schema, UnresolvedReference, InvalidSystem };

  ConfigError(Kind kind, const std::string& what, std::string entity = {})
      : Error(what), kind_(kind), entity_(std::move(entity)) {}

  Kind kind() const noexcept { return kind_; }
  /// Name of the entity involved, when there is one.
  const std::string& entity() const noexcept { return entity_; }

 private:
  Kind kind_;
  std::string entity_;
};

ExperimentConfig parse_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

struct ExperimentResult {
  std::string id;
  ExperimentKind kind = ExperimentKind::Simulate;
  bool ok = false;
  nlohmann::json body;
  /// y_AB / y_BA traces kept for plot export (cascade and commute only).
  std::optional<std::pair<Trace, Trace>> pair;
};

struct Report {
  std::string digest;
  std::vector<ExperimentResult> results;

  nlohmann::json to_json() const;
};

/// Output could not be written, or another failure outside a single experiment.
class RunError : public Error {
 public:
  using Error::Error;
};

/// Executes every experiment in order. Traces and plot CSVs go to out_dir
/// and the report is written to out_dir/report.json. Failures inside one
/// experiment are recorded in its entry; only I/O failures throw RunError.
Report run(const ExperimentConfig& config, const std::string& out_dir);

/// Writes out_dir/<id>_plot.csv with header `t,y_ab,y_ba,diff`.
std::vector<std::string> emit_plot_data(const Report& report, const std::string& experiment_id,
                                        const std::string& out_dir);

}  // namespace ltvc
