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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgrec/circuit.hpp"
#include "sgrec/density_state.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/pauli.hpp"
#include "sgrec/rng.hpp"
#include "sgrec/schwinger.hpp"
#include "sgrec/spectrum.hpp"

namespace sgrec {

enum class VariantKind : std::uint8_t {
  IdealEd = 0,
  IdealCircuit = 1,
  NoisyOrig = 2,
  AddedNoise = 3,
  Zne = 4,
  GrecMitigated = 5,
  ZneMitigated = 6,
};

inline constexpr std::array<const char*, 7> kVariantNames{
    "ideal_ed", "ideal_circuit", "noisy_orig", "added_noise", "zne", "grec_mitigated", "zne_mitigated"};

/// What produced a line: the kind plus its added-noise realization r (>= 1
/// for added_noise) and noise factor f (odd, for zne).
struct Variant {
  VariantKind kind = VariantKind::IdealEd;
  int realization = 0;
  int fold = 1;

  static Variant ideal_ed() { return {VariantKind::IdealEd, 0, 1}; }
  static Variant ideal_circuit() { return {VariantKind::IdealCircuit, 0, 1}; }
  static Variant noisy_orig() { return {VariantKind::NoisyOrig, 0, 1}; }
  static Variant added_noise(int r) { return {VariantKind::AddedNoise, r, 1}; }
  static Variant zne(int f) { return {VariantKind::Zne, 0, f}; }

  const char* name() const noexcept { return kVariantNames[static_cast<std::size_t>(kind)]; }

  static VariantKind parse_kind(const std::string& s) {
    for (std::size_t k = 0; k < kVariantNames.size(); ++k)
      if (s == kVariantNames[k]) return static_cast<VariantKind>(k);
    throw InvalidArgument("unknown variant '" + s + "'");
  }

  bool operator==(const Variant&) const = default;
};

struct EnergySample {
  int i = 0;
  double t = 0.0;
  double l0 = 0.0;
  double energy = 0.0;
};

/// Energies of level alpha at every time point of one ramp.
struct EnergyLine {
  int alpha = 0;
  RampSchedule schedule;
  Variant variant;
  std::vector<EnergySample> samples;

  std::vector<double> energies() const {
    std::vector<double> e;
    e.reserve(samples.size());
    for (const auto& s : samples) e.push_back(s.energy);
    return e;
  }

  std::vector<double> l0_values() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.l0);
    return v;
  }

  void validate() const {
    if (samples.size() != static_cast<std::size_t>(schedule.n_steps) + 1) {
      throw InvalidArgument("line must have n_steps + 1 samples");
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (samples[k].i != static_cast<int>(k)) throw InvalidArgument("samples out of order");
    }
  }
};

struct EvolutionConfig {
  int n_steps = 100;
  double total_time = 10.0;
  Measurement measurement = Measurement::exact();
  double noise_p = 1e-6;
  std::uint64_t seed = 20250101;
  std::vector<int> levels{0, 1};
  double phi1 = 0.0;  // fixed W_P angles; only phi3 is sampled
  double phi2 = 0.0;

  void validate() const {
    if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
    if (!(total_time > 0.0)) throw InvalidArgument("total time must be positive");
    if (!(noise_p >= 0.0 && noise_p <= 1.0)) throw InvalidArgument("noise_p must lie in [0, 1]");
    if (measurement.shots && *measurement.shots <= 0) throw InvalidArgument("shots must be positive");
    if (levels.empty()) throw InvalidArgument("level set is empty");
    for (int a : levels)
      if (a < 0 || a > 1) throw InvalidArgument("levels must be drawn from {0, 1}");
  }

  NoiseRotation rotation(int realization) const {
    return NoiseRotation::sample(seed, realization, phi1, phi2);
  }
};

/// Seed of the shot-noise stream for one line. zne lines share the
/// noisy_orig stream, so zne(1) reproduces noisy_orig in shot mode too.
inline std::uint64_t line_seed(const EvolutionConfig& cfg, const Variant& v, int alpha, int tau) {
  const VariantKind kind = v.kind == VariantKind::Zne ? VariantKind::NoisyOrig : v.kind;
  return derive_seed(cfg.seed, {0x6d656173ULL, static_cast<std::uint64_t>(kind),
                                static_cast<std::uint64_t>(alpha), static_cast<std::uint64_t>(tau),
                                static_cast<std::uint64_t>(v.fold),
                                static_cast<std::uint64_t>(v.realization)});
}

/// Exact-diagonalization line along a schedule, level identity by overlap.
inline EnergyLine ideal_ed_line(const ModelParams& params, const RampSchedule& schedule, int alpha,
                                int workers = 1) {
  if (alpha < 0 || alpha > 1) throw InvalidArgument("alpha must be 0 or 1");
  schedule.validate();
  const auto tracked = track_levels(params, schedule.l0_grid(), 2, workers);
  EnergyLine line{alpha, schedule, Variant::ideal_ed(), {}};
  for (int i = 0; i <= schedule.n_steps; ++i) {
    line.samples.push_back({i, schedule.time_at(i), tracked.grid[static_cast<std::size_t>(i)],
                            tracked.lines[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(i)]});
  }
  return line;
}

/// Trotterized adiabatic evolution of level alpha along `schedule`.
///
/// The state starts as the exact eigenvector at schedule.l0_start. Step i
/// applies one Trotter slice of H(l0_i) (perturbed by `rotation` for the
/// added-noise variant, folded for zne) and then measures the unperturbed
/// H(l0_i).
inline EnergyLine evolve_line(const ModelParams& params, const RampSchedule& schedule,
                              const Variant& variant, int alpha, const EvolutionConfig& cfg,
                              const NoiseRotation& rotation) {
  cfg.validate();
  schedule.validate();
  if (variant.kind == VariantKind::IdealEd) return ideal_ed_line(params, schedule, alpha);
  if (variant.kind == VariantKind::GrecMitigated || variant.kind == VariantKind::ZneMitigated) {
    throw InvalidArgument("mitigated lines are produced by the mitigation modules");
  }
  if (variant.fold < 1 || variant.fold % 2 == 0) throw InvalidArgument("noise factor must be odd");
  if (variant.fold != 1 && variant.kind != VariantKind::Zne) {
    throw InvalidArgument("only zne lines are folded");
  }

  const double dt = schedule.total_time / schedule.n_steps;
  const NoiseModel noise{variant.kind == VariantKind::IdealCircuit ? 0.0 : cfg.noise_p};
  Rng rng(line_seed(cfg, variant, alpha, schedule.tau));

  DensityState rho = DensityState::pure(prepare_initial_state(params, schedule.l0_start, alpha));
  EnergyLine line{alpha, schedule, variant, {}};
  line.samples.reserve(static_cast<std::size_t>(schedule.n_steps) + 1);
  line.samples.push_back({0, 0.0, schedule.l0_at(0),
                          measure_energy(rho, build_hamiltonian(params, schedule.l0_at(0)),
                                         cfg.measurement, &rng)});
  for (int i = 1; i <= schedule.n_steps; ++i) {
    const double l0 = schedule.l0_at(i);
    const PauliSum h = build_hamiltonian(params, l0);
    const PauliSum h_evol =
        variant.kind == VariantKind::AddedNoise ? apply_added_noise(params, l0, rotation) : h;
    GateCircuit slice = compile_slice(h_evol, dt);
    if (variant.fold > 1) slice = fold_slice(slice, variant.fold);
    run_circuit(rho, slice, noise);
    line.samples.push_back({i, schedule.time_at(i), l0, measure_energy(rho, h, cfg.measurement, &rng)});
  }
  return line;
}

inline EnergyLine evolve_line(const ModelParams& params, const RampSchedule& schedule,
                              const Variant& variant, int alpha, const EvolutionConfig& cfg) {
  const NoiseRotation rot = variant.kind == VariantKind::AddedNoise
                                ? cfg.rotation(variant.realization)
                                : NoiseRotation::identity();
  return evolve_line(params, schedule, variant, alpha, cfg, rot);
}

struct AdiabaticityReport {
  double min_overlap = 1.0;
  std::vector<double> overlaps;  // |<E_alpha(l0_i)|psi(t_i)>|^2 for i = 0..n_steps
};

/// Evolves level alpha with the exact piecewise-constant propagator
/// exp(-i H(l0_i) dt) (no Trotter error, no noise) and compares against the
/// tracked instantaneous eigenstate at every time point.
inline AdiabaticityReport adiabaticity_check(const ModelParams& params, const RampSchedule& schedule,
                                             int alpha, int workers = 1) {
  schedule.validate();
  const auto tracked = track_levels(params, schedule.l0_grid(), 2, workers);
  const auto a = static_cast<std::size_t>(alpha);
  StateVector psi = tracked.states.at(a)[0];
  const double dt = schedule.total_time / schedule.n_steps;

  AdiabaticityReport rep;
  rep.overlaps.push_back(std::norm(tracked.states[a][0].dot(psi)));
  for (int i = 1; i <= schedule.n_steps; ++i) {
    const ComplexMatrix h = to_dense(build_hamiltonian(params, schedule.l0_at(i)));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -dt)).array().exp();
    psi = es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * psi);
    rep.overlaps.push_back(std::norm(tracked.states[a][static_cast<std::size_t>(i)].dot(psi)));
  }
  rep.min_overlap = *std::min_element(rep.overlaps.begin(), rep.overlaps.end());
  return rep;
}

}  // namespace sgrec
