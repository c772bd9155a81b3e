// ltvc: batch front end for the commutativity laboratory.
//
//   ltvc run --config exp.json --out results/ [--step 1e-3] [--domain 0 5]
//   ltvc validate --config exp.json
//
// Exit codes: 0 all experiments executed, 1 configuration error,
// 2 runtime failure. Verdicts never affect the exit code.

#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "ltvc/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

ltvc::ConfigOverrides overrides_from(const std::optional<double>& step,
                                     const std::vector<double>& domain) {
  ltvc::ConfigOverrides o;
  o.step = step;
  if (domain.size() == 2) o.domain = ltvc::Domain{domain[0], domain[1]};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commutativity of LTV systems with their feedback conjugates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<double> step;
  std::vector<double> domain;

  auto* run = app.add_subcommand("run", "Run every experiment in a config and write a report");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory for report.json and CSV files")->required();
  run->add_option("--step", step, "Override the RK4 step")->check(CLI::PositiveNumber);
  run->add_option("--domain", domain, "Override the time domain: t0 t1")->expected(2);

  auto* validate = app.add_subcommand("validate", "Load and validate a config without running it");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  ltvc::ExperimentConfig cfg;
  try {
    cfg = ltvc::load_config(config_path, overrides_from(step, domain));
  } catch (const ltvc::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (validate->parsed()) {
    std::cout << "config OK: " << cfg.systems.size() << " systems, " << cfg.gains.size()
              << " gain pairs, " << cfg.signals.size() << " signals, " << cfg.experiments.size()
              << " experiments\n";
    return 0;
  }

  try {
    const ltvc::Report report = ltvc::run(cfg, out_dir);
    for (const auto& r : report.results) {
      std::cout << r.id << " [" << ltvc::to_string(r.kind) << "] ";
      if (!r.ok) {
        std::cout << "error: " << r.body.value("error", "") << '\n';
        continue;
      }
      if (r.body.contains("verdict")) {
        std::cout << r.body["verdict"]["decision"].get<std::string>();
      } else if (r.body.contains("result") && r.body["result"].contains("decision")) {
        std::cout << r.body["result"]["decision"].get<std::string>();
      } else if (r.body.contains("result") && r.body["result"].contains("satisfied")) {
        std::cout << (r.body["result"]["satisfied"].get<bool>() ? "satisfied" : "not satisfied");
      } else {
        std::cout << "ok";
      }
      std::cout << '\n';
    }
    std::cout << "report: " << out_dir << "/report.json\n";
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
