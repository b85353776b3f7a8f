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
#include <string>
#include <vector>

#include "sgrec/errors.hpp"
#include "sgrec/pauli.hpp"

namespace sgrec {

/// Lattice Schwinger model in the qubit (Jordan-Wigner) formulation with open
/// boundaries.
struct ModelParams {
  int n_sites = 6;
  double volume = 30.0;      // dimensionless lattice volume V
  double mass_ratio = 0.0;   // m/g
  double lagrange = 100.0;   // penalty enforcing zero total charge

  double x() const noexcept {
    const double r = static_cast<double>(n_sites) / volume;
    return r * r;
  }

  void validate() const {
    if (n_sites < 2 || n_sites % 2 != 0) {
      throw InvalidArgument("site count must be even and >= 2, got " + std::to_string(n_sites));
    }
    if (n_sites > kMaxDenseQubits) throw DimensionError("site count exceeds dense simulation range");
    if (!(volume > 0.0) || !std::isfinite(volume)) throw InvalidArgument("volume must be positive");
    if (!std::isfinite(mass_ratio)) throw InvalidArgument("mass ratio must be finite");
    if (!(lagrange > 0.0) || !std::isfinite(lagrange)) {
      throw InvalidArgument("Lagrange multiplier must be positive");
    }
  }

  /// Soft diagnostics that do not prevent a run.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (lagrange < 10.0) w.push_back("lambda < 10 may not suppress charged sectors");
    return w;
  }
};

/// Marks partitioning the background-field range into the learning region
/// [l0_min, l0_int] and the prediction region (l0_int, l0_max].
struct DomainSpec {
  double l0_min = 0.0;
  double l0_int = 0.0;
  double l0_star = 0.0;
  double l0_max = 0.0;

  void validate() const {
    if (!(l0_min < l0_int && l0_int < l0_star && l0_star < l0_max)) {
      throw InvalidArgument("domain marks must satisfy l0_min < l0_int < l0_star < l0_max");
    }
  }

  /// Absolute slack used when classifying grid points against l0_int, so
  /// that a point computed as l0_int up to rounding stays in the learning set.
  double boundary_tolerance() const noexcept { return 1e-12 * std::max(1.0, std::abs(l0_int)); }

  bool in_learning(double l0) const noexcept {
    return l0 >= l0_min - boundary_tolerance() && l0 <= l0_int + boundary_tolerance();
  }
  bool in_prediction(double l0) const noexcept {
    return l0 > l0_int + boundary_tolerance() && l0 <= l0_max + boundary_tolerance();
  }
};

/// Linear background-field ramp sampled on n_steps Trotter steps.
/// tau == 0 is the main line; tau >= 1 indexes training lines.
struct RampSchedule {
  double l0_start = 0.0;
  double l0_end = 0.0;
  double total_time = 10.0;
  int n_steps = 100;
  int tau = 0;

  void validate() const {
    if (!(total_time > 0.0)) throw InvalidArgument("total time must be positive");
    if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  }

  double time_at(int i) const noexcept {
    return i == n_steps ? total_time : total_time * static_cast<double>(i) / n_steps;
  }

  double value(double t) const {
    if (!(t >= 0.0 && t <= total_time)) {
      throw InvalidArgument("ramp time " + std::to_string(t) + " outside [0, T]");
    }
    return std::lerp(l0_start, l0_end, t / total_time);
  }

  double l0_at(int i) const { return value(time_at(i)); }

  std::vector<double> l0_grid() const {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) g.push_back(l0_at(i));
    return g;
  }
};

inline double ramp_value(const RampSchedule& s, double t) { return s.value(t); }

/// Main ramp from l0_min to l0_max.
inline RampSchedule main_schedule(const DomainSpec& d, double total_time, int n_steps) {
  RampSchedule s{d.l0_min, d.l0_max, total_time, n_steps, 0};
  s.validate();
  return s;
}

/// Endpoint grid for training ramps: endpoint tau sits at fraction
/// (n_endpoints - tau) / (n_endpoints - 1) of [l0_min, l0_int]. The default
/// of 11 endpoints spaces them by a tenth of the learning region.
struct EndpointGrid {
  int n_endpoints = 11;

  double fraction(int tau) const {
    return static_cast<double>(n_endpoints - tau) / static_cast<double>(n_endpoints - 1);
  }
};

/// Training ramps tau = 1..n_train, i.e. the n_train endpoints nearest l0_int.
inline std::vector<RampSchedule> training_schedules(const DomainSpec& d, double total_time,
                                                    int n_steps, int n_train,
                                                    EndpointGrid grid = {}) {
  if (grid.n_endpoints < 2) throw InvalidArgument("endpoint grid needs at least two points");
  if (n_train < 2 || n_train > grid.n_endpoints) {
    throw InvalidArgument("n_train must lie in [2, " + std::to_string(grid.n_endpoints) +
                          "], got " + std::to_string(n_train));
  }
  std::vector<RampSchedule> out;
  for (int tau = 1; tau <= n_train; ++tau) {
    RampSchedule s{d.l0_min, std::lerp(d.l0_min, d.l0_int, grid.fraction(tau)), total_time,
                   n_steps, tau};
    s.validate();
    out.push_back(s);
  }
  return out;
}

// --- Hamiltonian -------------------------------------------------------------

/// Calls emit(PauliString) once for every term group of the Hamiltonian, in a
/// fixed order, before any merging.
template <class Emit>
void for_each_schwinger_term(const ModelParams& p, double l0, Emit&& emit) {
  p.validate();
  const int n = p.n_sites;
  const double nd = static_cast<double>(n);
  const double x = p.x();

  for (int s = 0; s + 1 < n; ++s) {
    emit(PauliString::on_sites(n, {{s, Pauli::X}, {s + 1, Pauli::X}}, x / 2.0));
    emit(PauliString::on_sites(n, {{s, Pauli::Y}, {s + 1, Pauli::Y}}, x / 2.0));
  }
  for (int s = 0; s + 1 < n; ++s) {
    for (int k = s + 1; k < n; ++k) {
      emit(PauliString::on_sites(n, {{s, Pauli::Z}, {k, Pauli::Z}},
                                 0.5 * (static_cast<double>(n - k - 1) + p.lagrange)));
    }
  }
  for (int s = 0; s + 1 < n; ++s) {
    const int half_ceil = (s + 1) / 2;
    emit(PauliString::on_sites(
        n, {{s, Pauli::Z}},
        nd / 4.0 - 0.5 * static_cast<double>(half_ceil) + l0 * static_cast<double>(n - s - 1)));
  }
  const double mass = p.mass_ratio * std::sqrt(x);
  for (int s = 0; s < n; ++s) {
    emit(PauliString::on_sites(n, {{s, Pauli::Z}}, (s % 2 == 0) ? mass : -mass));
  }
  emit(PauliString::identity(
      n, l0 * l0 * (nd - 1.0) + 0.5 * l0 * nd + nd * nd / 8.0 + p.lagrange * nd / 4.0));
}

/// Canonical Pauli-sum form of the lattice Hamiltonian at background field l0.
inline PauliSum build_hamiltonian(const ModelParams& p, double l0) {
  PauliSum sum(p.n_sites);
  for_each_schwinger_term(p, l0, [&](PauliString t) { sum.add(std::move(t)); });
  return canonicalize(sum);
}

/// Replaces every non-identity factor P of every term by W_P^dagger P W_P and
/// returns the canonicalized, still Hermitian, result.
inline PauliSum apply_added_noise(const PauliSum& sum, const NoiseRotation& rot) {
  std::array<PauliExpansion, 4> image{};
  for (Pauli p : kNonIdentityPaulis) image[static_cast<std::size_t>(p)] = conjugate_pauli(p, rot);

  PauliSum out(sum.n_sites());
  for (const auto& term : sum.terms()) {
    // Expand the product of per-site images factor by factor.
    std::vector<PauliString> partial{PauliString{term.axes, term.coefficient}};
    for (int s = 0; s < term.n_sites(); ++s) {
      const Pauli p = term.axes[static_cast<std::size_t>(s)];
      if (p == Pauli::I) continue;
      std::vector<PauliString> next;
      for (const auto& prefix : partial) {
        for (int k = 0; k < 4; ++k) {
          const double w = image[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
          if (w == 0.0) continue;
          PauliString t = prefix;
          t.axes[static_cast<std::size_t>(s)] = static_cast<Pauli>(k);
          t.coefficient *= w;
          next.push_back(std::move(t));
        }
      }
      partial = std::move(next);
    }
    for (auto& t : partial) out.add(std::move(t));
  }
  return canonicalize(out);
}

inline PauliSum apply_added_noise(const ModelParams& p, double l0, const NoiseRotation& rot) {
  PauliSum raw(p.n_sites);
  for_each_schwinger_term(p, l0, [&](PauliString t) { raw.add(std::move(t)); });
  return apply_added_noise(raw, rot);
}

/// Coefficient of each term linear in l0, i.e. dH/dl0 without the l0^2 part.
/// Used to bound how fast eigenvalues can move along the ramp.
inline double field_derivative_bound(const ModelParams& p, double l0_max_abs) {
  const double n = static_cast<double>(p.n_sites);
  double bound = 0.0;
  for (int s = 0; s + 1 < p.n_sites; ++s) bound += n - s - 1;
  return bound + 2.0 * l0_max_abs * (n - 1.0) + 0.5 * n;
}

// --- presets -----------------------------------------------------------------

struct Preset {
  std::string name;
  ModelParams model;
  DomainSpec domain;
};

/// N = 6, V = 30, lambda = 100 with the background-field windows around the
/// minimal gap (m/g = 0) and the level crossing (m/g = 10).
inline Preset preset_for_mass(double mass_ratio) {
  if (mass_ratio == 0.0) {
    return {"mg0", {6, 30.0, 0.0, 100.0}, {0.511527, 0.512187, 0.512360, 0.512527}};
  }
  if (mass_ratio == 10.0) {
    return {"mg10", {6, 30.0, 10.0, 100.0}, {1.832633, 1.833293, 1.833466, 1.833633}};
  }
  throw InvalidArgument("built-in presets exist for m/g in {0, 10} only");
}

/// Desk-scale N = 4 variant (x = 0.04 as in the N = 6 presets); the window has
/// the same widths, centred on this lattice's own minimal gap.
inline Preset reduced_preset() {
  return {"n4", {4, 20.0, 0.0, 100.0}, {0.499964, 0.500624, 0.500797, 0.500964}};
}

inline Preset preset_by_name(const std::string& name) {
  if (name == "mg0") return preset_for_mass(0.0);
  if (name == "mg10") return preset_for_mass(10.0);
  if (name == "n4") return reduced_preset();
  throw InvalidArgument("unknown preset '" + name + "' (expected mg0, mg10 or n4)");
}

}  // namespace sgrec
