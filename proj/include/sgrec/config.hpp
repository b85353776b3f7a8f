// Copyright 2026 The sgrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sgrec/adiabatic.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/schwinger.hpp"

namespace sgrec {

/// Everything a pipeline run needs. Built from a preset, then overridden by
/// a key-value file, then by command-line flags.
struct RunConfig {
  std::string preset = "mg0";
  ModelParams model = preset_for_mass(0.0).model;
  DomainSpec domain = preset_for_mass(0.0).domain;
  EvolutionConfig evolution;
  int n_train_min = 2;
  int n_train_max = 11;
  int n_evol_zne_min = 2;
  int n_evol_zne_max = 10;
  int realizations = 1;
  std::string out_dir = "out";
  std::string run_id;  // empty: the preset name
  int workers = 0;     // 0: hardware concurrency

  std::string effective_run_id() const { return run_id.empty() ? preset : run_id; }

  int effective_workers() const {
    if (workers > 0) return workers;
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  }

  /// Largest noise factor any zne line needs.
  int max_fold() const { return 2 * n_evol_zne_max - 1; }

  void validate() const {
    if (model.n_sites < 2 || model.n_sites % 2 != 0) throw ConfigError("N", "must be even and >= 2");
    if (model.n_sites > kMaxDenseQubits) {
      throw ConfigError("N", "exceeds the dense simulation limit of " + std::to_string(kMaxDenseQubits));
    }
    if (!(model.volume > 0.0) || !std::isfinite(model.volume)) throw ConfigError("V", "must be positive");
    if (!std::isfinite(model.mass_ratio)) throw ConfigError("mg", "must be finite");
    if (!(model.lagrange > 0.0) || !std::isfinite(model.lagrange)) {
      throw ConfigError("lambda", "must be positive");
    }
    if (!std::isfinite(domain.l0_min)) throw ConfigError("l0_min", "must be finite");
    if (!(domain.l0_int > domain.l0_min)) throw ConfigError("l0_int", "must exceed l0_min");
    if (!(domain.l0_star > domain.l0_int)) throw ConfigError("l0_star", "must exceed l0_int");
    if (!(domain.l0_max > domain.l0_star) || !std::isfinite(domain.l0_max)) {
      throw ConfigError("l0_max", "must exceed l0_star");
    }
    if (!(evolution.total_time > 0.0) || !std::isfinite(evolution.total_time)) {
      throw ConfigError("T", "must be positive");
    }
    if (evolution.n_steps < 1) throw ConfigError("n_steps", "must be >= 1");
    if (!(evolution.noise_p >= 0.0 && evolution.noise_p <= 1.0)) {
      throw ConfigError("noise_p", "must lie in [0, 1]");
    }
    if (evolution.measurement.shots && *evolution.measurement.shots <= 0) {
      throw ConfigError("shots", "must be positive");
    }
    if (!std::isfinite(evolution.phi1)) throw ConfigError("phi1", "must be finite");
    if (!std::isfinite(evolution.phi2)) throw ConfigError("phi2", "must be finite");
    if (realizations < 1) throw ConfigError("R", "must be >= 1");
    if (n_train_max > EndpointGrid{}.n_endpoints) {
      throw ConfigError("n_train", "must be <= " + std::to_string(EndpointGrid{}.n_endpoints));
    }
    if (n_train_min < realizations + 1) throw ConfigError("n_train", "must be >= R + 1");
    if (n_train_max < n_train_min) throw ConfigError("n_train", "must be >= " + std::to_string(n_train_min));
    if (n_evol_zne_min < 2) throw ConfigError("n_evol_zne", "must be >= 2");
    if (n_evol_zne_max < n_evol_zne_min) {
      throw ConfigError("n_evol_zne", "must be >= " + std::to_string(n_evol_zne_min));
    }
    if (workers < 0) throw ConfigError("workers", "must be >= 0");
    if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
    const std::string id = effective_run_id();
    if (id.empty() || id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-") !=
                          std::string::npos || id == "." || id == "..") {
      throw ConfigError("run_id", "may only contain letters, digits, '.', '_' and '-'");
    }
  }
};

/// Raw `key = value` settings, later entries overriding earlier ones.
using Settings = std::map<std::string, std::string>;

inline const std::set<std::string>& known_setting_keys() {
  static const std::set<std::string> keys{
      "preset", "N",     "V",     "mg",      "lambda",  "l0_min", "l0_int",  "l0_star",
      "l0_max", "T",     "n_steps", "n_train", "n_evol_zne", "noise_p", "seed", "shots",
      "phi1",   "phi2",  "R",     "workers", "run_id",  "out_dir"};
  return keys;
}

/// Parses `key = value` lines. Blank lines and text after '#' are ignored.
inline Settings parse_settings(std::istream& in, const std::string& source = "<config>") {
  Settings out;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_setting_keys().contains(key)) throw ConfigError(key, "unknown key at " + where);
    if (value.empty()) throw ConfigError(key, "missing value at " + where);
    out[key] = value;
  }
  return out;
}

inline Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config file");
  return parse_settings(in, path);
}

namespace detail {

inline double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end || !std::isfinite(x)) throw ConfigError(key, "not a number: '" + v + "'");
  return x;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& v) {
  Int x{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key, "not an integer: '" + v + "'");
  return x;
}

}  // namespace detail

/// Resolves settings into a validated configuration. The preset is taken
/// from `preset`, else from `mg` when it names a built-in mass; every other
/// key then overrides the preset value.
inline RunConfig resolve_config(const Settings& s) {
  RunConfig cfg;
  const auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = s.find(k);
    if (it == s.end()) return std::nullopt;
    return it->second;
  };

  for (const auto& [k, _] : s)
    if (!known_setting_keys().contains(k)) throw ConfigError(k, "unknown key");

  std::string preset = "mg0";
  if (const auto p = get("preset")) {
    preset = *p;
  } else if (const auto mg = get("mg")) {
    const double m = detail::parse_real("mg", *mg);
    if (m == 10.0) preset = "mg10";
  }
  try {
    const Preset p = preset_by_name(preset);
    cfg.preset = p.name;
    cfg.model = p.model;
    cfg.domain = p.domain;
  } catch (const InvalidArgument& e) {
    throw ConfigError("preset", e.what());
  }

  using detail::parse_integer;
  using detail::parse_real;
  if (auto v = get("N")) cfg.model.n_sites = parse_integer<int>("N", *v);
  if (auto v = get("V")) cfg.model.volume = parse_real("V", *v);
  if (auto v = get("mg")) cfg.model.mass_ratio = parse_real("mg", *v);
  if (auto v = get("lambda")) cfg.model.lagrange = parse_real("lambda", *v);
  if (auto v = get("l0_min")) cfg.domain.l0_min = parse_real("l0_min", *v);
  if (auto v = get("l0_int")) cfg.domain.l0_int = parse_real("l0_int", *v);
  if (auto v = get("l0_star")) cfg.domain.l0_star = parse_real("l0_star", *v);
  if (auto v = get("l0_max")) cfg.domain.l0_max = parse_real("l0_max", *v);
  if (auto v = get("T")) cfg.evolution.total_time = parse_real("T", *v);
  if (auto v = get("n_steps")) cfg.evolution.n_steps = parse_integer<int>("n_steps", *v);
  if (auto v = get("n_train")) cfg.n_train_max = parse_integer<int>("n_train", *v);
  if (auto v = get("n_evol_zne")) cfg.n_evol_zne_max = parse_integer<int>("n_evol_zne", *v);
  if (auto v = get("noise_p")) cfg.evolution.noise_p = parse_real("noise_p", *v);
  if (auto v = get("seed")) cfg.evolution.seed = parse_integer<std::uint64_t>("seed", *v);
  if (auto v = get("shots")) {
    if (*v == "exact") {
      cfg.evolution.measurement = Measurement::exact();
    } else {
      cfg.evolution.measurement = Measurement::with_shots(parse_integer<std::int64_t>("shots", *v));
    }
  }
  if (auto v = get("phi1")) cfg.evolution.phi1 = parse_real("phi1", *v);
  if (auto v = get("phi2")) cfg.evolution.phi2 = parse_real("phi2", *v);
  if (auto v = get("R")) cfg.realizations = parse_integer<int>("R", *v);
  if (auto v = get("workers")) cfg.workers = parse_integer<int>("workers", *v);
  if (auto v = get("run_id")) cfg.run_id = *v;
  if (auto v = get("out_dir")) cfg.out_dir = *v;
  cfg.validate();
  return cfg;
}

/// Settings in file syntax, suitable for `resolve_config` round trips.
inline std::string format_settings(const RunConfig& c) {
  std::ostringstream o;
  const auto real = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  o << "preset = " << c.preset << "\n";
  o << "N = " << c.model.n_sites << "\n";
  o << "V = " << real(c.model.volume) << "\n";
  o << "mg = " << real(c.model.mass_ratio) << "\n";
  o << "lambda = " << real(c.model.lagrange) << "\n";
  o << "l0_min = " << real(c.domain.l0_min) << "\n";
  o << "l0_int = " << real(c.domain.l0_int) << "\n";
  o << "l0_star = " << real(c.domain.l0_star) << "\n";
  o << "l0_max = " << real(c.domain.l0_max) << "\n";
  o << "T = " << real(c.evolution.total_time) << "\n";
  o << "n_steps = " << c.evolution.n_steps << "\n";
  o << "n_train = " << c.n_train_max << "\n";
  o << "n_evol_zne = " << c.n_evol_zne_max << "\n";
  o << "noise_p = " << real(c.evolution.noise_p) << "\n";
  o << "seed = " << c.evolution.seed << "\n";
  o << "shots = "
    << (c.evolution.measurement.shots ? std::to_string(*c.evolution.measurement.shots) : std::string("exact"))
    << "\n";
  o << "phi1 = " << real(c.evolution.phi1) << "\n";
  o << "phi2 = " << real(c.evolution.phi2) << "\n";
  o << "R = " << c.realizations << "\n";
  o << "run_id = " << c.effective_run_id() << "\n";
  return o.str();
}

}  // namespace sgrec
