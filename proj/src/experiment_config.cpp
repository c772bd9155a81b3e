#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "ltvc/experiment.hpp"

namespace ltvc {

using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Cascade: return "cascade";
    case ExperimentKind::ClosedLoop: return "closed-loop";
    case ExperimentKind::Commute: return "commute";
    case ExperimentKind::StructuralN1: return "structural-n1";
    case ExperimentKind::StructuralN2: return "structural-n2";
    case ExperimentKind::Theorem1: return "theorem1";
    case ExperimentKind::Theorem2: return "theorem2";
    case ExperimentKind::Conjugate: return "conjugate";
  }
  return "?";
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Schema, path + ": " + msg);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "missing field '" + key + "'");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, path + "." + key);
}

std::string string_or(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? std::string() : as_string(*it, path + "." + key);
}

const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object");
  return v;
}

Domain as_domain(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) schema_error(path, "expected [t0, t1]");
  return Domain{as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

Expr as_expr(const json& v, const std::string& path) {
  const std::string text = as_string(v, path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    schema_error(path, std::string("expression '") + text + "': " + e.what());
  }
}

Signal parse_signal(const json& s, const std::string& path) {
  as_object(s, path);
  const std::string kind = as_string(member(s, "kind", path), path + ".kind");
  if (kind == "step") return UnitStep{};
  if (kind == "sinusoid") {
    return Sinusoid{number_or(s, "amplitude", 1.0, path), number_or(s, "omega", 1.0, path),
                    number_or(s, "phase", 0.0, path)};
  }
  if (kind == "chirp") {
    return Chirp{number_or(s, "amplitude", 1.0, path), number_or(s, "f0", 0.1, path),
                 number_or(s, "f1", 2.0, path)};
  }
  if (kind == "piecewise-linear") {
    const json& knots = member(s, "knots", path);
    if (!knots.is_array()) schema_error(path + ".knots", "expected an array of [t, value]");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const std::string kp = path + ".knots[" + std::to_string(i) + "]";
      if (!knots[i].is_array() || knots[i].size() != 2) schema_error(kp, "expected [t, value]");
      pts.emplace_back(as_number(knots[i][0], kp), as_number(knots[i][1], kp));
    }
    try {
      return PiecewiseLinear(std::move(pts));
    } catch (const Error& e) {
      schema_error(path, e.what());
    }
  }
  if (kind == "analytic") return Analytic{as_expr(member(s, "expr", path), path + ".expr")};
  schema_error(path + ".kind", "unknown signal kind '" + kind + "'");
}

ExperimentKind parse_kind(const std::string& text, const std::string& path) {
  static const std::map<std::string, ExperimentKind> kinds = {
      {"simulate", ExperimentKind::Simulate},
      {"cascade", ExperimentKind::Cascade},
      {"closed-loop", ExperimentKind::ClosedLoop},
      {"commute", ExperimentKind::Commute},
      {"structural-n1", ExperimentKind::StructuralN1},
      {"structural-n2", ExperimentKind::StructuralN2},
      {"theorem1", ExperimentKind::Theorem1},
      {"theorem2", ExperimentKind::Theorem2},
      {"conjugate", ExperimentKind::Conjugate},
  };
  auto it = kinds.find(text);
  if (it == kinds.end()) schema_error(path, "unknown experiment kind '" + text + "'");
  return it->second;
}

template <class Map>
void require_ref(const Map& names, const std::string& name, const char* what,
                 const std::string& path) {
  if (name.empty()) schema_error(path, std::string("missing ") + what + " reference");
  if (!names.contains(name)) {
    throw ConfigError(ConfigError::Kind::UnresolvedReference,
                      path + ": undefined " + what + " '" + name + "'", name);
  }
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

LtvSystem build_system(const std::string& name, std::vector<Expr> coeffs, Domain domain) {
  try {
    return make_system(std::move(coeffs), domain);
  } catch (const SystemError& e) {
    throw ConfigError(ConfigError::Kind::InvalidSystem, "system '" + name + "': " + e.what(), name);
  }
}

}  // namespace

ExperimentConfig parse_config(const json& input, const ConfigOverrides& overrides) {
  if (!input.is_object()) schema_error("<root>", "expected an object");
  json doc = input;
  if (overrides.step) doc["solver"]["step"] = *overrides.step;
  if (overrides.domain) {
    doc["solver"]["domain"] = {overrides.domain->t0, overrides.domain->t1};
    if (doc.contains("systems") && doc["systems"].is_object()) {
      for (auto& [name, s] : doc["systems"].items()) {
        if (s.is_object() && s.contains("domain")) s["domain"] = doc["solver"]["domain"];
      }
    }
  }

  ExperimentConfig cfg;
  cfg.digest = sha256_hex(doc.dump());

  if (auto it = doc.find("solver"); it != doc.end()) {
    const json& s = as_object(*it, "solver");
    cfg.solver.step = number_or(s, "step", cfg.solver.step, "solver");
    if (!(cfg.solver.step > 0.0)) schema_error("solver.step", "must be positive");
    if (auto r = s.find("refinement"); r != s.end()) {
      if (!r->is_number_integer() || r->get<int>() < 1) {
        schema_error("solver.refinement", "expected an integer >= 1");
      }
      cfg.solver.refinement = r->get<int>();
    }
    if (auto d = s.find("domain"); d != s.end()) cfg.domain = as_domain(*d, "solver.domain");
    if (auto g = s.find("grid_points"); g != s.end()) {
      if (!g->is_number_integer() || g->get<long long>() < 2) {
        schema_error("solver.grid_points", "expected an integer >= 2");
      }
      cfg.grid_points = g->get<std::size_t>();
    }
    if (auto th = s.find("thresholds"); th != s.end()) {
      as_object(*th, "solver.thresholds");
      cfg.thresholds.pass = number_or(*th, "pass", cfg.thresholds.pass, "solver.thresholds");
      cfg.thresholds.fail = number_or(*th, "fail", cfg.thresholds.fail, "solver.thresholds");
      cfg.thresholds.constancy =
          number_or(*th, "constancy", cfg.thresholds.constancy, "solver.thresholds");
    }
  }

  if (auto it = doc.find("gains"); it != doc.end()) {
    for (const auto& [name, g] : as_object(*it, "gains").items()) {
      const std::string path = "gains." + name;
      as_object(g, path);
      cfg.gains.emplace(name, GainPair{as_expr(member(g, "alpha", path), path + ".alpha"),
                                       as_expr(member(g, "beta", path), path + ".beta")});
    }
  }

  if (auto it = doc.find("signals"); it != doc.end()) {
    for (const auto& [name, s] : as_object(*it, "signals").items()) {
      cfg.signals.emplace(name, parse_signal(s, "signals." + name));
    }
  }

  // Base systems first, then conjugates in dependency order.
  std::map<std::string, std::pair<std::string, std::string>> pending;  // name -> (base, gains)
  if (auto it = doc.find("systems"); it != doc.end()) {
    for (const auto& [name, s] : as_object(*it, "systems").items()) {
      const std::string path = "systems." + name;
      as_object(s, path);
      if (s.contains("conjugate_of")) {
        const std::string base = as_string(s["conjugate_of"], path + ".conjugate_of");
        const std::string gains = as_string(member(s, "gains", path), path + ".gains");
        require_ref(cfg.gains, gains, "gains", path);
        pending.emplace(name, std::make_pair(base, gains));
        continue;
      }
      const json& coeffs = member(s, "coeffs", path);
      if (!coeffs.is_array()) schema_error(path + ".coeffs", "expected an array of expressions");
      std::vector<Expr> exprs;
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        exprs.push_back(as_expr(coeffs[i], path + ".coeffs[" + std::to_string(i) + "]"));
      }
      const Domain domain = s.contains("domain") ? as_domain(s["domain"], path + ".domain") : cfg.domain;
      cfg.systems.emplace(name, build_system(name, std::move(exprs), domain));
    }
  }
  while (!pending.empty()) {
    bool progressed = false;
    for (auto it = pending.begin(); it != pending.end();) {
      const auto& [name, ref] = *it;
      auto base = cfg.systems.find(ref.first);
      if (base == cfg.systems.end()) {
        ++it;
        continue;
      }
      try {
        cfg.systems.emplace(name, feedback_conjugate(base->second, cfg.gains.at(ref.second)));
      } catch (const SystemError& e) {
        throw ConfigError(ConfigError::Kind::InvalidSystem, "system '" + name + "': " + e.what(), name);
      }
      it = pending.erase(it);
      progressed = true;
    }
    if (!progressed) {
      const auto& [name, ref] = *pending.begin();
      const bool declared = pending.contains(ref.first);
      throw ConfigError(ConfigError::Kind::UnresolvedReference,
                        "systems." + name + ": " +
                            (declared ? "circular conjugate_of chain through '" + ref.first + "'"
                                      : "undefined system '" + ref.first + "'"),
                        ref.first);
    }
  }

  const json& exps = member(doc, "experiments", "<root>");
  if (!exps.is_array() || exps.empty()) schema_error("experiments", "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const std::string path = "experiments[" + std::to_string(i) + "]";
    const json& e = as_object(exps[i], path);
    Experiment x;
    x.kind = parse_kind(as_string(member(e, "kind", path), path + ".kind"), path + ".kind");
    x.id = e.contains("id") ? as_string(e["id"], path + ".id") : "exp" + std::to_string(i + 1);
    if (!ids.insert(x.id).second) schema_error(path + ".id", "duplicate experiment id '" + x.id + "'");

    switch (x.kind) {
      case ExperimentKind::Simulate:
        x.system = string_or(e, "system", path);
        x.signal = string_or(e, "signal", path);
        require_ref(cfg.systems, x.system, "system", path);
        require_ref(cfg.signals, x.signal, "signal", path);
        break;
      case ExperimentKind::Cascade:
        x.system = string_or(e, "first", path);
        x.second = string_or(e, "second", path);
        x.signal = string_or(e, "signal", path);
        require_ref(cfg.systems, x.system, "system", path);
        require_ref(cfg.systems, x.second, "system", path);
        require_ref(cfg.signals, x.signal, "signal", path);
        break;
      case ExperimentKind::ClosedLoop:
        x.system = string_or(e, "system", path);
        x.gains = string_or(e, "gains", path);
        x.signal = string_or(e, "signal", path);
        require_ref(cfg.systems, x.system, "system", path);
        require_ref(cfg.gains, x.gains, "gains", path);
        require_ref(cfg.signals, x.signal, "signal", path);
        break;
      case ExperimentKind::Commute:
      case ExperimentKind::StructuralN1:
      case ExperimentKind::StructuralN2:
        x.system = string_or(e, "a", path);
        x.second = string_or(e, "b", path);
        require_ref(cfg.systems, x.system, "system", path);
        require_ref(cfg.systems, x.second, "system", path);
        if (auto p = e.find("probes"); p != e.end() && x.kind == ExperimentKind::Commute) {
          if (!p->is_array()) schema_error(path + ".probes", "expected an array of signal names");
          for (const auto& name : *p) {
            x.probes.push_back(as_string(name, path + ".probes"));
            require_ref(cfg.signals, x.probes.back(), "signal", path);
          }
        }
        break;
      case ExperimentKind::Theorem1:
      case ExperimentKind::Conjugate:
        x.system = string_or(e, "system", path);
        x.gains = string_or(e, "gains", path);
        require_ref(cfg.systems, x.system, "system", path);
        require_ref(cfg.gains, x.gains, "gains", path);
        break;
      case ExperimentKind::Theorem2:
        x.gains = string_or(e, "gains1", path);
        x.gains2 = string_or(e, "gains2", path);
        x.system = string_or(e, "system", path);
        require_ref(cfg.gains, x.gains, "gains", path);
        require_ref(cfg.gains, x.gains2, "gains", path);
        if (!x.system.empty()) require_ref(cfg.systems, x.system, "system", path);
        break;
    }
    cfg.experiments.push_back(std::move(x));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigError::Kind::File, "cannot open config file '" + path + "'", path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Parse, path + ": " + e.what());
  }
  return parse_config(doc, overrides);
}

}  // namespace ltvc
