#pragma once
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/bourgain.hpp"
#include "kdvlab/experiments.hpp"

namespace kdvlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal TOML subset: [section] headers, key = value lines, # comments.
// Values: integers, floats, booleans, double-quoted strings, and flat arrays
// of those.  Enough to mirror the experiment structs one-to-one; anything
// fancier in a config is a mistake we want to reject loudly.
struct ConfigValue {
  enum class Kind { Int, Float, Bool, Str, Array } kind = Kind::Int;
  long long i = 0;
  double f = 0.0;
  bool b = false;
  std::string s;
  std::vector<ConfigValue> items;
};

struct ConfigDoc {
  // section -> key -> value; "" is the (disallowed) top level.
  std::map<std::string, std::map<std::string, ConfigValue>> sections;
};

namespace detail {

inline void strip(std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
}

inline ConfigValue parse_scalar(const std::string& tok, int lineno) {
  ConfigValue v;
  if (tok == "true" || tok == "false") {
    v.kind = ConfigValue::Kind::Bool;
    v.b = (tok == "true");
    return v;
  }
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.kind = ConfigValue::Kind::Str;
    v.s = tok.substr(1, tok.size() - 2);
    return v;
  }
  bool is_float = tok.find_first_of(".eE") != std::string::npos &&
                  tok.find_first_not_of("+-0123456789.eE") == std::string::npos;
  try {
    size_t used = 0;
    if (is_float) {
      v.kind = ConfigValue::Kind::Float;
      v.f = std::stod(tok, &used);
    } else {
      v.kind = ConfigValue::Kind::Int;
      v.i = std::stoll(tok, &used);
    }
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(lineno) + ": cannot parse value '" + tok +
                      "'");
  }
  return v;
}

inline ConfigValue parse_value(std::string raw, int lineno) {
  strip(raw);
  if (raw.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": missing value");
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("config line " + std::to_string(lineno) + ": unterminated array");
    ConfigValue v;
    v.kind = ConfigValue::Kind::Array;
    std::string body = raw.substr(1, raw.size() - 2);
    std::string tok;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        strip(tok);
        if (!tok.empty()) v.items.push_back(parse_scalar(tok, lineno));
        tok.clear();
      } else {
        tok += c;
      }
    }
    strip(tok);
    if (!tok.empty()) v.items.push_back(parse_scalar(tok, lineno));
    return v;
  }
  return parse_scalar(raw, lineno);
}

}  // namespace detail

inline ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  std::string section;
  int lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    ++lineno;
    // strip comments outside strings
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    detail::strip(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = line.substr(1, line.size() - 2);
      detail::strip(section);
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = line.substr(0, eq);
    detail::strip(key);
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key '" + key +
                        "' outside any [section]");
    if (doc.sections[section].count(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + section +
                        "." + key + "'");
    doc.sections[section][key] = detail::parse_value(line.substr(eq + 1), lineno);
  }
  return doc;
}

// ---- schema ----------------------------------------------------------------
// One global schema; each subcommand consumes the sections it needs.  A key
// outside this table is a typo and the run must stop.

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"grid", {"n_modes"}},
      {"time", {"horizon", "tau_log2", "tau_ref_log2", "ref_estimate_fraction"}},
      {"data", {"kind", "s0", "margin", "normalize_to", "seeds"}},
      {"schemes", {"names"}},
      {"fit", {"first", "last"}},
      {"probe",
       {"n_fields", "n_pairs", "window_T", "bilinear_s", "seed0", "window_doubling", "s0",
        "margin"}},
      {"local", {"refine"}},
      {"run", {"jobs"}},
  };
  return schema;
}

inline void check_schema(const ConfigDoc& doc) {
  const auto& schema = config_schema();
  for (const auto& [section, keys] : doc.sections) {
    auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!it->second.count(key))
        throw ConfigError("config: unknown key '" + section + "." + key + "'");
  }
}

inline const ConfigValue* find(const ConfigDoc& doc, const std::string& section,
                               const std::string& key) {
  auto s = doc.sections.find(section);
  if (s == doc.sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

inline long long as_int(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::Int)
    throw ConfigError("config: '" + where + "' must be an integer");
  return v.i;
}

inline double as_float(const ConfigValue& v, const std::string& where) {
  if (v.kind == ConfigValue::Kind::Int) return static_cast<double>(v.i);
  if (v.kind != ConfigValue::Kind::Float)
    throw ConfigError("config: '" + where + "' must be a number");
  return v.f;
}

inline bool as_bool(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::Bool)
    throw ConfigError("config: '" + where + "' must be true or false");
  return v.b;
}

inline std::string as_str(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::Str)
    throw ConfigError("config: '" + where + "' must be a quoted string");
  return v.s;
}

inline std::vector<long long> as_int_array(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::Array)
    throw ConfigError("config: '" + where + "' must be an array");
  std::vector<long long> out;
  for (const ConfigValue& item : v.items) out.push_back(as_int(item, where));
  return out;
}

inline std::vector<std::string> as_str_array(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::Array)
    throw ConfigError("config: '" + where + "' must be an array");
  std::vector<std::string> out;
  for (const ConfigValue& item : v.items) out.push_back(as_str(item, where));
  return out;
}

}  // namespace detail

inline SchemeKind scheme_from_name(const std::string& name) {
  if (name == "exp_integrator") return SchemeKind::ExpIntegrator;
  if (name == "lie_splitting") return SchemeKind::LieSplitting;
  if (name == "resonance") return SchemeKind::Resonance;
  if (name == "quadrature_oracle") return SchemeKind::QuadratureOracle;
  throw ConfigError("config: unknown scheme '" + name + "'");
}

inline DataKind data_kind_from_name(const std::string& name) {
  if (name == "cosine") return DataKind::Cosine;
  if (name == "two_mode") return DataKind::TwoMode;
  if (name == "rough") return DataKind::Rough;
  throw ConfigError("config: unknown data kind '" + name + "'");
}

// tau values enter configs as base-2 exponents so ladders are exact dyadics.
inline std::vector<double> taus_from_log2(const std::vector<long long>& exps) {
  std::vector<double> out;
  for (long long e : exps) {
    if (e < -62 || e > 62) throw ConfigError("config: tau_log2 exponent out of range");
    out.push_back(std::ldexp(1.0, static_cast<int>(e)));
  }
  return out;
}

inline ExperimentConfig experiment_config_from(const ConfigDoc& doc) {
  detail::check_schema(doc);
  ExperimentConfig cfg;
  if (const auto* v = detail::find(doc, "grid", "n_modes"))
    cfg.grid.n_modes = static_cast<int>(detail::as_int(*v, "grid.n_modes"));
  else
    throw ConfigError("config: missing required key 'grid.n_modes'");
  if (const auto* v = detail::find(doc, "time", "horizon"))
    cfg.horizon = detail::as_float(*v, "time.horizon");
  if (const auto* v = detail::find(doc, "time", "tau_log2"))
    cfg.tau_ladder = taus_from_log2(detail::as_int_array(*v, "time.tau_log2"));
  else
    throw ConfigError("config: missing required key 'time.tau_log2'");
  if (const auto* v = detail::find(doc, "time", "tau_ref_log2")) {
    long long e = detail::as_int(*v, "time.tau_ref_log2");
    if (e < -62 || e > 62) throw ConfigError("config: tau_ref_log2 out of range");
    cfg.reference.tau_ref = std::ldexp(1.0, static_cast<int>(e));
  }
  if (const auto* v = detail::find(doc, "time", "ref_estimate_fraction"))
    cfg.reference.max_estimate_fraction = detail::as_float(*v, "time.ref_estimate_fraction");
  if (const auto* v = detail::find(doc, "data", "kind"))
    cfg.data = data_kind_from_name(detail::as_str(*v, "data.kind"));
  if (const auto* v = detail::find(doc, "data", "s0")) cfg.s0 = detail::as_float(*v, "data.s0");
  if (const auto* v = detail::find(doc, "data", "margin"))
    cfg.margin = detail::as_float(*v, "data.margin");
  if (const auto* v = detail::find(doc, "data", "normalize_to"))
    cfg.normalize_to = detail::as_float(*v, "data.normalize_to");
  if (const auto* v = detail::find(doc, "data", "seeds")) {
    cfg.seeds.clear();
    for (long long s : detail::as_int_array(*v, "data.seeds")) {
      if (s < 0) throw ConfigError("config: seeds must be nonnegative");
      cfg.seeds.push_back(static_cast<uint64_t>(s));
    }
  }
  if (const auto* v = detail::find(doc, "schemes", "names")) {
    cfg.schemes.clear();
    for (const std::string& name : detail::as_str_array(*v, "schemes.names"))
      cfg.schemes.push_back(scheme_from_name(name));
  } else {
    cfg.schemes = {SchemeKind::ExpIntegrator, SchemeKind::LieSplitting, SchemeKind::Resonance};
  }
  if (const auto* v = detail::find(doc, "fit", "first"))
    cfg.fit_first = static_cast<int>(detail::as_int(*v, "fit.first"));
  if (const auto* v = detail::find(doc, "fit", "last"))
    cfg.fit_last = static_cast<int>(detail::as_int(*v, "fit.last"));
  if (const auto* v = detail::find(doc, "local", "refine"))
    cfg.local_refine = static_cast<int>(detail::as_int(*v, "local.refine"));
  if (const auto* v = detail::find(doc, "run", "jobs"))
    cfg.jobs = static_cast<int>(detail::as_int(*v, "run.jobs"));
  return cfg;
}

inline ProbeConfig probe_config_from(const ConfigDoc& doc) {
  detail::check_schema(doc);
  ProbeConfig cfg;
  if (const auto* v = detail::find(doc, "grid", "n_modes"))
    cfg.grid.n_modes = static_cast<int>(detail::as_int(*v, "grid.n_modes"));
  if (const auto* v = detail::find(doc, "time", "tau_log2"))
    cfg.taus = taus_from_log2(detail::as_int_array(*v, "time.tau_log2"));
  else
    throw ConfigError("config: missing required key 'time.tau_log2'");
  if (const auto* v = detail::find(doc, "probe", "n_fields"))
    cfg.n_fields = static_cast<int>(detail::as_int(*v, "probe.n_fields"));
  if (const auto* v = detail::find(doc, "probe", "n_pairs"))
    cfg.n_pairs = static_cast<int>(detail::as_int(*v, "probe.n_pairs"));
  if (const auto* v = detail::find(doc, "probe", "window_T"))
    cfg.window_T = detail::as_float(*v, "probe.window_T");
  if (const auto* v = detail::find(doc, "probe", "bilinear_s"))
    cfg.bilinear_s = detail::as_float(*v, "probe.bilinear_s");
  if (const auto* v = detail::find(doc, "probe", "seed0")) {
    long long s = detail::as_int(*v, "probe.seed0");
    if (s < 0) throw ConfigError("config: probe.seed0 must be nonnegative");
    cfg.seed0 = static_cast<uint64_t>(s);
  }
  if (const auto* v = detail::find(doc, "probe", "window_doubling"))
    cfg.window_doubling = detail::as_bool(*v, "probe.window_doubling");
  if (const auto* v = detail::find(doc, "probe", "s0")) cfg.s0 = detail::as_float(*v, "probe.s0");
  if (const auto* v = detail::find(doc, "probe", "margin"))
    cfg.margin = detail::as_float(*v, "probe.margin");
  if (const auto* v = detail::find(doc, "run", "jobs"))
    cfg.jobs = static_cast<int>(detail::as_int(*v, "run.jobs"));
  return cfg;
}

}  // namespace kdvlab
