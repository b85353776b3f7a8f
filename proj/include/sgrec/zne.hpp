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

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgrec/adiabatic.hpp"
#include "sgrec/errors.hpp"

namespace sgrec {

/// (noise factor, energy) pairs measured at one time point.
struct ZneSeries {
  std::vector<int> factors;
  std::vector<double> energies;

  void validate() const {
    if (factors.size() != energies.size()) throw InvalidArgument("factor and energy counts differ");
    if (factors.size() < 2) throw InvalidArgument("extrapolation needs at least two noise factors");
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (factors[k] != static_cast<int>(2 * k + 1)) {
        throw InvalidArgument("noise factors must be 1, 3, 5, ...");
      }
    }
  }
};

/// Noise factors f = 2q - 1 for q = 1..n_evol.
inline std::vector<int> noise_factors(int n_evol) {
  if (n_evol < 2) throw InvalidArgument("ZNE needs n_evol >= 2");
  std::vector<int> f;
  for (int q = 1; q <= n_evol; ++q) f.push_back(2 * q - 1);
  return f;
}

/// Intercept at f = 0 of the ordinary least-squares line through the series.
inline double extrapolate_point(const ZneSeries& s) {
  if (s.factors.size() < 2 || s.factors.size() != s.energies.size()) {
    throw InvalidArgument("extrapolation needs at least two (f, E) points");
  }
  const auto n = static_cast<double>(s.factors.size());
  double fbar = 0.0, ebar = 0.0;
  for (std::size_t k = 0; k < s.factors.size(); ++k) {
    fbar += s.factors[k];
    ebar += s.energies[k];
  }
  fbar /= n;
  ebar /= n;
  double sff = 0.0, sfe = 0.0;
  for (std::size_t k = 0; k < s.factors.size(); ++k) {
    const double df = s.factors[k] - fbar;
    sff += df * df;
    sfe += df * (s.energies[k] - ebar);
  }
  if (sff == 0.0) throw InvalidArgument("noise factors must not all coincide");
  return ebar - (sfe / sff) * fbar;
}

/// Time-point-wise extrapolation of lines measured at f = 1, 3, ... .
/// `lines[q]` must be the line at noise factor 2q + 1.
inline EnergyLine mitigate_line_zne(const std::vector<EnergyLine>& lines, int alpha) {
  if (lines.size() < 2) throw InvalidArgument("ZNE needs lines at two or more noise factors");
  std::vector<int> factors;
  for (const auto& l : lines) {
    if (l.alpha != alpha) throw InvalidArgument("line belongs to another level");
    if (l.samples.size() != lines[0].samples.size()) {
      throw InvalidArgument("noise-factor lines have different numbers of time points");
    }
    factors.push_back(l.variant.fold);
  }
  ZneSeries probe{factors, std::vector<double>(factors.size(), 0.0)};
  probe.validate();

  EnergyLine out{alpha, lines[0].schedule, {VariantKind::ZneMitigated, 0, factors.back()}, {}};
  for (std::size_t i = 0; i < lines[0].samples.size(); ++i) {
    ZneSeries s{factors, {}};
    for (const auto& l : lines) s.energies.push_back(l.samples[i].energy);
    auto sample = lines[0].samples[i];
    sample.energy = extrapolate_point(s);
    out.samples.push_back(sample);
  }
  return out;
}

}  // namespace sgrec
