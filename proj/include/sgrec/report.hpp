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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sgrec/adiabatic.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/grec.hpp"

namespace sgrec {

/// Shortest decimal form that round-trips a double (17 significant digits).
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_real_field(const std::string& s, const std::string& path) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc{} || ptr != end) throw IoError(path, "malformed number '" + s + "'");
  return x;
}

inline int parse_int_field(const std::string& s, const std::string& path) {
  int x = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc{} || ptr != end) throw IoError(path, "malformed integer '" + s + "'");
  return x;
}

/// Comma-separated table written row by row. Fields never contain commas.
class CsvWriter {
 public:
  CsvWriter(std::string path, const std::vector<std::string>& header) : path_(std::move(path)) {
    const auto parent = std::filesystem::path(path_).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError(parent.string(), "cannot create directory: " + ec.message());
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError(path_, "cannot open for writing");
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) out_ << ',';
      out_ << fields[k];
    }
    out_ << '\n';
    if (!out_) throw IoError(path_, "write failed");
  }

  void close() {
    out_.close();
    if (!out_) throw IoError(path_, "close failed");
  }

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline const std::vector<std::string>& energy_line_header() {
  static const std::vector<std::string> h{"run_id", "variant", "alpha", "tau", "r", "f", "i", "t", "l0", "energy"};
  return h;
}

inline void write_energy_lines(const std::string& path, const std::string& run_id,
                               const std::vector<EnergyLine>& lines) {
  CsvWriter w(path, energy_line_header());
  for (const auto& l : lines) {
    for (const auto& s : l.samples) {
      w.row({run_id, l.variant.name(), std::to_string(l.alpha), std::to_string(l.schedule.tau),
             std::to_string(l.variant.realization), std::to_string(l.variant.fold), std::to_string(s.i),
             format_real(s.t), format_real(s.l0), format_real(s.energy)});
    }
  }
  w.close();
}

struct EnergyLineFile {
  std::string run_id;
  std::vector<EnergyLine> lines;
};

/// Reads lines written by write_energy_lines. Each line's schedule is
/// recovered from its first and last samples.
inline EnergyLineFile read_energy_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string text;
  if (!std::getline(in, text)) throw IoError(path, "missing header");
  if (split_csv_line(text) != energy_line_header()) throw IoError(path, "unexpected header '" + text + "'");

  using Key = std::tuple<int, int, int, int, int>;  // kind, alpha, tau, r, f
  std::map<Key, std::size_t> index;
  EnergyLineFile file;
  int lineno = 1;
  while (std::getline(in, text)) {
    ++lineno;
    if (text.empty()) continue;
    const auto f = split_csv_line(text);
    if (f.size() != energy_line_header().size()) {
      throw IoError(path, "line " + std::to_string(lineno) + ": expected 10 fields");
    }
    if (file.run_id.empty()) file.run_id = f[0];
    VariantKind kind{};
    try {
      kind = Variant::parse_kind(f[1]);
    } catch (const InvalidArgument& e) {
      throw IoError(path, "line " + std::to_string(lineno) + ": " + e.what());
    }
    const Variant v{kind, parse_int_field(f[4], path), parse_int_field(f[5], path)};
    const int alpha = parse_int_field(f[2], path);
    const int tau = parse_int_field(f[3], path);
    const Key key{static_cast<int>(kind), alpha, tau, v.realization, v.fold};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, file.lines.size()).first;
      EnergyLine l;
      l.alpha = alpha;
      l.variant = v;
      l.schedule.tau = tau;
      file.lines.push_back(std::move(l));
    }
    auto& line = file.lines[it->second];
    const EnergySample s{parse_int_field(f[6], path), parse_real_field(f[7], path),
                         parse_real_field(f[8], path), parse_real_field(f[9], path)};
    if (s.i != static_cast<int>(line.samples.size())) {
      throw IoError(path, "line " + std::to_string(lineno) + ": samples out of order");
    }
    line.samples.push_back(s);
  }
  for (auto& l : file.lines) {
    if (l.samples.size() < 2) throw IoError(path, "line with fewer than two samples");
    l.schedule.n_steps = static_cast<int>(l.samples.size()) - 1;
    l.schedule.l0_start = l.samples.front().l0;
    l.schedule.l0_end = l.samples.back().l0;
    l.schedule.total_time = l.samples.back().t;
    try {
      l.schedule.validate();
      l.validate();
    } catch (const Error& e) {
      throw IoError(path, e.what());
    }
  }
  return file;
}

inline void write_etas(const std::string& path, const EtaTable& etas) {
  CsvWriter w(path, {"alpha", "i", "r", "eta"});
  for (int a : etas.levels()) {
    for (int i = 0; i < etas.n_time_points(a); ++i) {
      if (!etas.has(a, i)) continue;
      for (int r = 0; r <= etas.realizations(); ++r) {
        w.row({std::to_string(a), std::to_string(i), std::to_string(r), format_real(etas.at(a, i, r))});
      }
    }
  }
  w.close();
}

inline EtaTable read_etas(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string text;
  if (!std::getline(in, text) || text != "alpha,i,r,eta") throw IoError(path, "unexpected header");
  std::map<std::pair<int, int>, std::vector<double>> rows;
  int r_max = 0;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    const auto f = split_csv_line(text);
    if (f.size() != 4) throw IoError(path, "expected 4 fields");
    const int r = parse_int_field(f[2], path);
    if (r < 0) throw IoError(path, "negative realization index");
    auto& v = rows[{parse_int_field(f[0], path), parse_int_field(f[1], path)}];
    if (v.size() <= static_cast<std::size_t>(r)) v.resize(static_cast<std::size_t>(r) + 1, 0.0);
    v[static_cast<std::size_t>(r)] = parse_real_field(f[3], path);
    r_max = std::max(r_max, r);
  }
  EtaTable t(std::max(1, r_max));
  for (auto& [k, v] : rows) t.set(k.first, k.second, {v, 0.0, 0});
  return t;
}

}  // namespace sgrec
