#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ltvc/experiment.hpp"

namespace ltvc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

json verdict_json(const Verdict& v) {
  json probes = json::array();
  for (const auto& p : v.probes) {
    probes.push_back({{"probe", p.probe}, {"d_coarse", number(p.coarse)}, {"d_fine", number(p.fine)}});
  }
  json out = {
      {"decision", to_string(v.decision)},
      {"d_coarse", number(v.worst_coarse)},
      {"d_fine", number(v.worst_fine)},
      {"step_coarse", v.step_coarse},
      {"step_fine", v.step_fine},
      {"probes", probes},
  };
  if (!v.diagnostic.empty()) out["diagnostic"] = v.diagnostic;
  return out;
}

json structural_json(const StructuralResult& r) {
  return {
      {"satisfied", r.satisfied},
      {"meaning", r.satisfied ? "necessary conditions satisfied" : "necessary conditions violated"},
      {"constants", numbers(r.constants)},
      {"residuals", numbers(r.residuals)},
      {"negated", r.negated},
  };
}

json coefficient_strings(const LtvSystem& sys) {
  json out = json::array();
  for (const Expr& c : sys.coeffs()) out.push_back(to_string(c));
  return out;
}

void write_csv(const Trace& trace, const fs::path& path) {
  try {
    write_trace_csv(trace, path.string());
  } catch (const Error& e) {
    throw RunError(e.what());
  }
}

void write_plot_csv(const Trace& ab, const Trace& ba, const fs::path& path) {
  if (ab.t.size() != ba.t.size()) throw Error("plot traces have different lengths");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RunError("cannot open " + path.string() + " for writing");
  os << "t,y_ab,y_ba,diff\n";
  char line[160];
  for (std::size_t k = 0; k < ab.t.size(); ++k) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", ab.t[k], ab.y[k], ba.y[k],
                  ab.y[k] - ba.y[k]);
    os << line;
  }
  if (!os) throw RunError("failed writing " + path.string());
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, fs::path out) : cfg_(cfg), out_(std::move(out)) {}

  ExperimentResult execute(const Experiment& x) {
    ExperimentResult r;
    r.id = x.id;
    r.kind = x.kind;
    r.body = {{"id", x.id}, {"kind", to_string(x.kind)}};
    try {
      dispatch(x, r);
      r.ok = true;
      r.body["status"] = "ok";
    } catch (const RunError&) {
      throw;
    } catch (const Error& e) {
      r.ok = false;
      r.pair.reset();
      r.body["status"] = "error";
      r.body["error"] = e.what();
    }
    return r;
  }

 private:
  const ExperimentConfig& cfg_;
  fs::path out_;

  const LtvSystem& system(const std::string& name) const { return cfg_.systems.at(name); }
  std::vector<double> grid_for(const Domain& d) const { return uniform_grid(d, cfg_.grid_points); }

  void dispatch(const Experiment& x, ExperimentResult& r) {
    json& b = r.body;
    switch (x.kind) {
      case ExperimentKind::Simulate: {
        b["system"] = x.system;
        b["signal"] = x.signal;
        const Trace tr = simulate(system(x.system), cfg_.signals.at(x.signal), cfg_.solver);
        const std::string file = x.id + ".csv";
        write_csv(tr, out_ / file);
        b["trace"] = file;
        b["y_final"] = tr.y.back();
        break;
      }
      case ExperimentKind::Cascade: {
        b["first"] = x.system;
        b["second"] = x.second;
        b["signal"] = x.signal;
        const Signal& sig = cfg_.signals.at(x.signal);
        Trace ab = simulate_cascade(system(x.system), system(x.second), sig, cfg_.solver);
        Trace ba = simulate_cascade(system(x.second), system(x.system), sig, cfg_.solver);
        write_csv(ab, out_ / (x.id + "_ab.csv"));
        write_csv(ba, out_ / (x.id + "_ba.csv"));
        b["trace_ab"] = x.id + "_ab.csv";
        b["trace_ba"] = x.id + "_ba.csv";
        b["discrepancy"] = number(discrepancy(ab, ba));
        r.pair.emplace(std::move(ab), std::move(ba));
        break;
      }
      case ExperimentKind::ClosedLoop: {
        b["system"] = x.system;
        b["gains"] = x.gains;
        b["signal"] = x.signal;
        const LtvSystem& base = system(x.system);
        const GainPair& g = cfg_.gains.at(x.gains);
        const Signal& sig = cfg_.signals.at(x.signal);
        const Trace loop = simulate_closed_loop(base, g, sig, cfg_.solver);
        const Trace realized = simulate(feedback_conjugate(base, g), sig, cfg_.solver);
        write_csv(loop, out_ / (x.id + ".csv"));
        b["trace"] = x.id + ".csv";
        b["realized_discrepancy"] = number(discrepancy(loop, realized));
        break;
      }
      case ExperimentKind::Commute: {
        b["a"] = x.system;
        b["b"] = x.second;
        const LtvSystem& a = system(x.system);
        std::vector<Signal> probes;
        for (const auto& name : x.probes) probes.push_back(cfg_.signals.at(name));
        if (probes.empty()) probes = default_probes(a.domain());
        Verdict v = numerical_commute_check(a, system(x.second), probes, cfg_.solver, cfg_.thresholds);
        b["verdict"] = verdict_json(v);
        if (!v.first_ab.t.empty()) r.pair.emplace(std::move(v.first_ab), std::move(v.first_ba));
        break;
      }
      case ExperimentKind::StructuralN1:
      case ExperimentKind::StructuralN2: {
        b["a"] = x.system;
        b["b"] = x.second;
        const LtvSystem& a = system(x.system);
        const auto grid = grid_for(a.domain());
        const StructuralResult s =
            x.kind == ExperimentKind::StructuralN1
                ? structural_check_n1(a, system(x.second), grid, cfg_.thresholds.constancy)
                : structural_check_n2(a, system(x.second), grid, cfg_.thresholds.constancy);
        b["result"] = structural_json(s);
        break;
      }
      case ExperimentKind::Theorem1: {
        b["system"] = x.system;
        b["gains"] = x.gains;
        const LtvSystem& base = system(x.system);
        const auto res = theorem1_check(base.order(), cfg_.gains.at(x.gains), grid_for(base.domain()),
                                        cfg_.thresholds.constancy);
        b["result"] = {
            {"decision", to_string(res.decision)},
            {"c_leading", number(res.c_leading)},
            {"c_zero", number(res.c_zero)},
            {"alpha_residual", number(res.alpha_residual)},
            {"beta_residual", number(res.beta_residual)},
        };
        break;
      }
      case ExperimentKind::Theorem2: {
        b["gains1"] = x.gains;
        b["gains2"] = x.gains2;
        const Domain d = x.system.empty() ? cfg_.domain : system(x.system).domain();
        const RelationFit fit = theorem2_fit(cfg_.gains.at(x.gains), cfg_.gains.at(x.gains2),
                                             grid_for(d), cfg_.thresholds.constancy);
        b["result"] = {
            {"satisfied", fit.satisfied},
            {"p", number(fit.p)},
            {"q", number(fit.q)},
            {"alpha_residual", number(fit.alpha_residual)},
            {"beta_residual", number(fit.beta_residual)},
        };
        break;
      }
      case ExperimentKind::Conjugate: {
        b["system"] = x.system;
        b["gains"] = x.gains;
        const LtvSystem conj = feedback_conjugate(system(x.system), cfg_.gains.at(x.gains));
        b["order"] = conj.order();
        b["coefficients"] = coefficient_strings(conj);
        break;
      }
    }
  }
};

}  // namespace

json Report::to_json() const {
  json entries = json::array();
  for (const auto& r : results) entries.push_back(r.body);
  return {
      {"tool", kToolName},
      {"version", kToolVersion},
      {"config_digest", digest},
      {"experiments", entries},
  };
}

Report run(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw RunError("cannot create output directory '" + out_dir + "': " + ec.message());
  }

  Report report;
  report.digest = config.digest;
  Runner runner(config, out);
  for (const auto& x : config.experiments) report.results.push_back(runner.execute(x));

  for (auto& r : report.results) {
    if (r.ok && r.pair) {
      r.body["plot"] = fs::path(emit_plot_data(report, r.id, out_dir).front()).filename().string();
    }
  }

  const fs::path report_path = out / "report.json";
  std::ofstream os(report_path, std::ios::binary);
  if (!os) throw RunError("cannot open " + report_path.string() + " for writing");
  os << report.to_json().dump(2) << '\n';
  if (!os) throw RunError("failed writing " + report_path.string());
  return report;
}

std::vector<std::string> emit_plot_data(const Report& report, const std::string& experiment_id,
                                        const std::string& out_dir) {
  for (const auto& r : report.results) {
    if (r.id != experiment_id) continue;
    if (r.kind != ExperimentKind::Commute && r.kind != ExperimentKind::Cascade) {
      throw Error("experiment '" + experiment_id + "' is of kind " + to_string(r.kind) +
                  "; plot data exists only for commute and cascade");
    }
    if (!r.ok || !r.pair) throw Error("experiment '" + experiment_id + "' has no traces to plot");
    const fs::path file = fs::path(out_dir) / (experiment_id + "_plot.csv");
    write_plot_csv(r.pair->first, r.pair->second, file);
    return {file.string()};
  }
  throw Error("unknown experiment id '" + experiment_id + "'");
}

}  // namespace ltvc
