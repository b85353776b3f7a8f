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

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgrec/adiabatic.hpp"
#include "sgrec/circuit.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/schwinger.hpp"

namespace sgrec {

enum class Region : std::uint8_t { Learning, Prediction, LearningAndPrediction };

inline const char* region_name(Region r) noexcept {
  switch (r) {
    case Region::Learning: return "L";
    case Region::Prediction: return "P";
    case Region::LearningAndPrediction: return "LuP";
  }
  return "?";
}

inline bool in_region(const DomainSpec& d, Region r, double l0) noexcept {
  switch (r) {
    case Region::Learning: return d.in_learning(l0);
    case Region::Prediction: return d.in_prediction(l0);
    case Region::LearningAndPrediction: return d.in_learning(l0) || d.in_prediction(l0);
  }
  return false;
}

/// Time points i of `line` whose l0 satisfies `keep`.
inline std::vector<int> select_indices(const EnergyLine& line, const std::function<bool(double)>& keep) {
  std::vector<int> out;
  for (const auto& s : line.samples)
    if (keep(s.l0)) out.push_back(s.i);
  return out;
}

inline std::vector<int> region_indices(const EnergyLine& line, const DomainSpec& d, Region r) {
  return select_indices(line, [&](double l0) { return in_region(d, r, l0); });
}

struct RegionError {
  std::string method;
  Region region = Region::Prediction;
  double value = 0.0;
  std::vector<int> levels;
  std::vector<int> indices;
};

namespace detail {

inline void check_aligned(const EnergyLine& em, const EnergyLine& ed) {
  if (em.alpha != ed.alpha) throw InvalidArgument("mitigated and reference lines are different levels");
  if (em.samples.size() != ed.samples.size()) throw InvalidArgument("lines have different lengths");
  for (std::size_t k = 0; k < em.samples.size(); ++k) {
    const double tol = 1e-12 * std::max(1.0, std::abs(ed.samples[k].l0));
    if (std::abs(em.samples[k].l0 - ed.samples[k].l0) > tol) {
      throw InvalidArgument("lines are not aligned on the same l0 points");
    }
  }
}

}  // namespace detail

/// Sum over levels of the per-level RMS deviation from the reference lines on
/// the time points `indices`.
inline double summed_rms_error(const std::vector<EnergyLine>& em, const std::vector<EnergyLine>& ed,
                               const std::vector<int>& indices) {
  if (em.size() != ed.size() || em.empty()) throw InvalidArgument("need one reference line per level");
  if (indices.empty()) throw InvalidArgument("error over an empty set of time points");
  double total = 0.0;
  for (std::size_t a = 0; a < em.size(); ++a) {
    detail::check_aligned(em[a], ed[a]);
    double sq = 0.0;
    for (int i : indices) {
      const double d = ed[a].samples.at(static_cast<std::size_t>(i)).energy -
                       em[a].samples.at(static_cast<std::size_t>(i)).energy;
      sq += d * d;
    }
    total += std::sqrt(sq / static_cast<double>(indices.size()));
  }
  return total;
}

inline RegionError region_error(const std::string& method, const std::vector<EnergyLine>& em,
                                const std::vector<EnergyLine>& ed, const DomainSpec& d, Region r) {
  if (em.empty()) throw InvalidArgument("no lines given");
  RegionError out{method, r, 0.0, {}, region_indices(ed.at(0), d, r)};
  for (const auto& l : em) out.levels.push_back(l.alpha);
  if (out.indices.empty()) throw InvalidArgument(std::string("region ") + region_name(r) + " has no time points");
  out.value = summed_rms_error(em, ed, out.indices);
  return out;
}

// --- gate budgets ------------------------------------------------------------------

enum class BudgetMethod : std::uint8_t { Noisy, Zne, Grec };

inline const char* budget_method_name(BudgetMethod m) noexcept {
  switch (m) {
    case BudgetMethod::Noisy: return "noisy";
    case BudgetMethod::Zne: return "zne";
    case BudgetMethod::Grec: return "grec";
  }
  return "?";
}

struct GateBudget {
  BudgetMethod method = BudgetMethod::Zne;
  int n_evol = 0;
  GateCounts per_slice;
  GateCounts totals;
};

/// Total gates over all simulations when every time point i is re-run from
/// the start with i + 1 slices: |S| n_G/TS (n+1)(n+2)/2 times n_evol^2 for
/// ZNE (folding multiplies every slice) or n_evol for GREC. `Noisy` is the
/// single unfolded original circuit.
inline GateBudget gate_budget(BudgetMethod method, int n_evol, const GateCounts& per_slice,
                              int n_steps, int n_levels) {
  switch (method) {
    case BudgetMethod::Noisy:
      if (n_evol != 1) throw InvalidArgument("the unmitigated run has n_evol = 1");
      break;
    case BudgetMethod::Zne:
      if (n_evol < 2) throw InvalidArgument("ZNE needs n_evol >= 2");
      break;
    case BudgetMethod::Grec:
      if (n_evol < 3) throw InvalidArgument("GREC needs n_evol >= 3");
      break;
  }
  if (n_steps < 0 || n_levels < 1) throw InvalidArgument("invalid step or level count");
  const std::int64_t n = n_steps;
  const std::int64_t triangle = (n + 1) * (n + 2);  // always even
  const std::int64_t evol = method == BudgetMethod::Zne ? std::int64_t{n_evol} * n_evol : n_evol;
  GateBudget b{method, n_evol, per_slice, {}};
  for (GateKind k : kAllGateKinds) b.totals[k] = n_levels * per_slice[k] * (triangle / 2) * evol;
  return b;
}

enum class CircuitFlavor : std::uint8_t { Original, AddedNoise };

/// Per-slice counts of the reference transpilation (CX, RZ, SX) for the two
/// N = 6 presets.
inline GateCounts reference_counts_per_slice(CircuitFlavor flavor, double mass_ratio) {
  GateCounts c;
  const bool massive = mass_ratio != 0.0;
  if (flavor == CircuitFlavor::Original) {
    c[GateKind::CX] = 50;
    c[GateKind::RZ] = massive ? 131 : 130;
    c[GateKind::SX] = 40;
  } else {
    c[GateKind::CX] = 70;
    c[GateKind::RZ] = massive ? 241 : 240;
    c[GateKind::SX] = 80;
  }
  return c;
}

/// Relative improvement of GREC over ZNE, normalized by the unmitigated error.
inline double improvement(double e_grec, double e_zne, double e_noisy) {
  if (!(e_noisy > 0.0)) throw InvalidArgument("unmitigated error must be positive");
  return (e_grec - e_zne) / e_noisy;
}

}  // namespace sgrec
