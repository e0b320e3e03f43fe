#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hsf/driver.hpp"
#include "hsf/flows.hpp"
#include "hsf/initial.hpp"

namespace hsf {

/// A parsed value from the flat `key = value` run-configuration format
/// (a TOML-compatible subset: dotted keys, quoted strings, numbers,
/// booleans, bracketed arrays, # comments).
struct ConfigValue {
  std::string raw;
  bool consumed = false;
};

class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text) {
    ConfigMap m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string stripped = strip_comment(line);
      const std::string t = trim(stripped);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(t.substr(0, eq));
      const std::string val = trim(t.substr(eq + 1));
      if (key.empty() || val.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
      if (m.vals_.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
      m.vals_[key] = {val, false};
    }
    return m;
  }

  static ConfigMap load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  bool has(const std::string& key) const { return vals_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) {
    auto it = vals_.find(key);
    if (it == vals_.end()) return dflt;
    it->second.consumed = true;
    return unquote(it->second.raw);
  }
  double get_double(const std::string& key, double dflt) {
    auto it = vals_.find(key);
    if (it == vals_.end()) return dflt;
    it->second.consumed = true;
    return to_double(it->second.raw, key);
  }
  long get_long(const std::string& key, long dflt) {
    auto it = vals_.find(key);
    if (it == vals_.end()) return dflt;
    it->second.consumed = true;
    return static_cast<long>(to_double(it->second.raw, key));
  }
  bool get_bool(const std::string& key, bool dflt) {
    auto it = vals_.find(key);
    if (it == vals_.end()) return dflt;
    it->second.consumed = true;
    if (it->second.raw == "true") return true;
    if (it->second.raw == "false") return false;
    throw ConfigError("config key '" + key + "': expected true/false");
  }
  std::vector<double> get_array(const std::string& key, const std::vector<double>& dflt) {
    auto it = vals_.find(key);
    if (it == vals_.end()) return dflt;
    it->second.consumed = true;
    const std::string& r = it->second.raw;
    if (r.size() < 2 || r.front() != '[' || r.back() != ']')
      throw ConfigError("config key '" + key + "': expected a [..] array");
    std::vector<double> out;
    std::string body = r.substr(1, r.size() - 2);
    std::istringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      out.push_back(to_double(t, key));
    }
    return out;
  }

  /// Unknown keys are configuration errors, never silent typos.
  void reject_unknown() const {
    for (const auto& [k, v] : vals_)
      if (!v.consumed) throw ConfigError("config: unknown key '" + k + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }
  static std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_str = !in_str;
      if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
  }
  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
  }
  static double to_double(const std::string& s, const std::string& key) {
    try {
      size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (...) {
      throw ConfigError("config key '" + key + "': cannot parse number '" + s + "'");
    }
  }

  std::map<std::string, ConfigValue> vals_;
};

/// Full description of one experiment run.
struct RunConfig {
  Kind kind = Kind::Parallelism;
  bool s3 = false;
  GridSpec grid;
  InitialCondition ic;
  StepperConfig stepper;
  std::string out_dir = "out";
  EntropySettings entropy;
};

inline Kind parse_kind(const std::string& s) {
  if (s == "parallelism" || s == "frames") return Kind::Parallelism;
  if (s == "acs") return Kind::ACS;
  if (s == "acts") return Kind::ACtS;
  if (s == "g2") return Kind::G2;
  throw ConfigError("unknown kind '" + s + "'");
}

inline RunConfig parse_run_config(const std::string& text) {
  ConfigMap m = ConfigMap::parse(text);
  RunConfig rc;
  rc.kind = parse_kind(m.get_string("kind", "parallelism"));
  const std::string base = m.get_string("base", "torus");
  if (base == "s3") {
    if (rc.kind != Kind::Parallelism) throw ConfigError("base = s3 requires kind = parallelism");
    rc.s3 = true;
    rc.grid = GridSpec::torus(1, {1}, {kVolS3});
  } else if (base != "torus") {
    throw ConfigError("unknown base '" + base + "'");
  }

  if (!rc.s3) {
    const std::vector<double> sz = m.get_array("grid.sizes", {});
    if (sz.empty()) throw ConfigError("grid.sizes is required");
    std::vector<int> sizes;
    for (double v : sz) sizes.push_back(static_cast<int>(v));
    std::vector<double> lengths =
        m.get_array("grid.lengths", std::vector<double>(sizes.size(), 2.0 * M_PI));
    rc.grid = GridSpec::torus(static_cast<int>(sizes.size()), sizes, lengths);
  }

  rc.ic.generator = m.get_string("ic.generator", "constant");
  rc.ic.amplitude = m.get_double("ic.amplitude", 0.1);
  rc.ic.seed = static_cast<uint64_t>(m.get_long("ic.seed", 1));
  rc.ic.component = static_cast<int>(m.get_long("ic.component", 0));
  rc.ic.cutoff = static_cast<int>(m.get_long("ic.cutoff", 2));
  rc.ic.lambda = m.get_double("ic.lambda", 0.0);
  for (double v : m.get_array("ic.wave", {})) rc.ic.wave.push_back(static_cast<int>(v));

  const std::string scheme = m.get_string("stepper.scheme", "rk4");
  if (scheme == "euler")
    rc.stepper.scheme = Scheme::Euler;
  else if (scheme == "rk4")
    rc.stepper.scheme = Scheme::RK4;
  else
    throw ConfigError("stepper.scheme must be euler or rk4");
  rc.stepper.dt = m.get_double("stepper.dt", 0.0);
  rc.stepper.cfl = m.get_double("stepper.cfl", 0.9);
  rc.stepper.max_steps = m.get_long("stepper.max_steps", 10000);
  rc.stepper.stop_tolerance = m.get_double("stepper.stop_tolerance", 1e-8);
  rc.stepper.repair_tol = m.get_double("stepper.repair_tol", 1e-6);
  rc.stepper.drift_tol = m.get_double("stepper.drift_tol", 1e-3);
  rc.stepper.drift_interval = m.get_long("stepper.drift_interval", 1);
  rc.stepper.blowup_factor = m.get_double("stepper.blowup_factor", 1e6);
  rc.stepper.sample_interval = m.get_long("output.sample_interval", 10);
  rc.stepper.snapshot_interval = m.get_long("output.snapshot_interval", 0);
  rc.out_dir = m.get_string("output.dir", "out");

  rc.entropy.enabled = m.get_bool("diagnostics.entropy", false);
  rc.entropy.horizon = m.get_double("diagnostics.entropy_horizon", 1.0);
  rc.entropy.center = m.get_array("diagnostics.entropy_center", {});

  m.reject_unknown();
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace hsf
