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

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgrec/density_state.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/pauli.hpp"
#include "sgrec/rng.hpp"

namespace sgrec {

enum class GateKind : std::uint8_t { CX = 0, ID = 1, RZ = 2, SX = 3, X = 4 };

inline constexpr std::array<GateKind, 5> kAllGateKinds{GateKind::CX, GateKind::ID, GateKind::RZ,
                                                       GateKind::SX, GateKind::X};

constexpr const char* gate_name(GateKind k) noexcept {
  constexpr std::array<const char*, 5> names{"CX", "ID", "RZ", "SX", "X"};
  return names[static_cast<std::size_t>(k)];
}

struct Gate {
  GateKind kind = GateKind::ID;
  int q0 = 0;       // target for single-qubit gates, control for CX
  int q1 = -1;      // CX target
  double angle = 0.0;  // RZ only

  static Gate cx(int control, int target) { return {GateKind::CX, control, target, 0.0}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
  static Gate sx(int q) { return {GateKind::SX, q, -1, 0.0}; }
  static Gate x(int q) { return {GateKind::X, q, -1, 0.0}; }
  static Gate id(int q) { return {GateKind::ID, q, -1, 0.0}; }

  bool is_two_qubit() const noexcept { return kind == GateKind::CX; }

  bool acts_on(int q) const noexcept { return q0 == q || (is_two_qubit() && q1 == q); }

  void validate(int n_qubits) const {
    if (q0 < 0 || q0 >= n_qubits) throw InvalidArgument("gate qubit out of range");
    if (is_two_qubit()) {
      if (q1 < 0 || q1 >= n_qubits) throw InvalidArgument("CX target out of range");
      if (q1 == q0) throw InvalidArgument("CX needs two distinct qubits");
    } else if (q1 != -1) {
      throw InvalidArgument("single-qubit gate with a second qubit");
    }
    if (kind != GateKind::RZ && angle != 0.0) throw InvalidArgument("only RZ carries an angle");
    if (!std::isfinite(angle)) throw InvalidArgument("non-finite gate angle");
  }
};

/// Gate list over {CX, ID, RZ, SX, X}, grouped into Trotter slices.
/// slice_marks holds the first gate index of every slice.
struct GateCircuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  std::vector<std::size_t> slice_marks;
  double global_phase = 0.0;  // circuit implements exp(i * global_phase) * product of gates

  explicit GateCircuit(int n = 0) : n_qubits(n) {}

  void begin_slice() { slice_marks.push_back(gates.size()); }

  void append(const Gate& g) {
    g.validate(n_qubits);
    gates.push_back(g);
  }

  std::size_t n_slices() const noexcept { return slice_marks.size(); }

  /// [begin, end) gate range of slice k.
  std::pair<std::size_t, std::size_t> slice_range(std::size_t k) const {
    const std::size_t end = k + 1 < slice_marks.size() ? slice_marks[k + 1] : gates.size();
    return {slice_marks.at(k), end};
  }

  void validate() const {
    for (const auto& g : gates) g.validate(n_qubits);
    for (std::size_t k = 1; k < slice_marks.size(); ++k) {
      if (slice_marks[k] < slice_marks[k - 1]) throw InvalidArgument("slice marks not ascending");
    }
    if (!slice_marks.empty() && slice_marks.back() > gates.size()) {
      throw InvalidArgument("slice mark past the end of the circuit");
    }
  }

  /// Appends all of `other` (slices included) after this circuit.
  void extend(const GateCircuit& other) {
    if (other.n_qubits != n_qubits) throw DimensionError("circuit widths differ");
    const std::size_t offset = gates.size();
    for (std::size_t m : other.slice_marks) slice_marks.push_back(m + offset);
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
    global_phase += other.global_phase;
  }
};

struct NoiseModel {
  double p_zflip = 0.0;  // probability of a Z error attached to every RZ

  static NoiseModel noiseless() { return {}; }

  void validate() const {
    if (!(p_zflip >= 0.0 && p_zflip <= 1.0)) throw InvalidArgument("p_zflip must lie in [0, 1]");
  }
};

// --- compilation ---------------------------------------------------------------

namespace detail {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

// H up to global phase.
inline void emit_hadamard(GateCircuit& c, int q) {
  c.append(Gate::rz(q, kHalfPi));
  c.append(Gate::sx(q));
  c.append(Gate::rz(q, kHalfPi));
}

// Maps P on qubit q to Z: H for X, H S^dagger for Y.
inline void emit_basis_change(GateCircuit& c, int q, Pauli p) {
  if (p == Pauli::X) {
    emit_hadamard(c, q);
  } else if (p == Pauli::Y) {
    c.append(Gate::rz(q, -kHalfPi));
    emit_hadamard(c, q);
  }
}

inline void emit_basis_restore(GateCircuit& c, int q, Pauli p) {
  if (p == Pauli::X) {
    emit_hadamard(c, q);
  } else if (p == Pauli::Y) {
    emit_hadamard(c, q);
    c.append(Gate::rz(q, kHalfPi));
  }
}

}  // namespace detail

/// Appends exp(-i * dt * coefficient * P) for one Pauli string.
inline void compile_term(const PauliString& term, double dt, GateCircuit& c) {
  const auto support = term.support();
  if (support.empty()) {
    c.global_phase -= term.coefficient * dt;
    return;
  }
  const auto axis = [&](int q) { return term.axes[static_cast<std::size_t>(q)]; };
  for (int q : support) detail::emit_basis_change(c, q, axis(q));
  for (std::size_t k = 0; k + 1 < support.size(); ++k) c.append(Gate::cx(support[k], support[k + 1]));
  c.append(Gate::rz(support.back(), 2.0 * term.coefficient * dt));
  for (std::size_t k = support.size() - 1; k-- > 0;) c.append(Gate::cx(support[k], support[k + 1]));
  for (auto it = support.rbegin(); it != support.rend(); ++it) detail::emit_basis_restore(c, *it, axis(*it));
}

/// One first-order Trotter slice: the product of term exponentials in the
/// sum's term order (canonical order for canonical sums).
inline GateCircuit compile_slice(const PauliSum& sum, double dt) {
  if (sum.empty()) throw InvalidArgument("cannot compile an empty Pauli sum");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  GateCircuit c(sum.n_sites());
  c.begin_slice();
  for (const auto& t : sum.terms()) compile_term(t, dt, c);
  return c;
}

namespace detail {

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

}  // namespace detail

/// Gates implementing the inverse of [begin, end), up to global phase.
///
/// SX^dagger is rewritten as Z SX Z with the Zs absorbed into the RZ gates
/// that flank every SX produced by `compile_term`, so the inverse uses the
/// same gate basis and exactly the same gate counts.
inline std::vector<Gate> inverse_gates(const std::vector<Gate>& gates, std::size_t begin,
                                       std::size_t end) {
  std::vector<Gate> inv(gates.rbegin() + static_cast<std::ptrdiff_t>(gates.size() - end),
                        gates.rbegin() + static_cast<std::ptrdiff_t>(gates.size() - begin));
  for (auto& g : inv)
    if (g.kind == GateKind::RZ) g.angle = -g.angle;
  for (std::size_t k = 0; k < inv.size(); ++k) {
    if (inv[k].kind != GateKind::SX) continue;
    const int q = inv[k].q0;
    const bool flanked = k > 0 && k + 1 < inv.size() && inv[k - 1].kind == GateKind::RZ &&
                         inv[k - 1].q0 == q && inv[k + 1].kind == GateKind::RZ && inv[k + 1].q0 == q;
    if (!flanked) throw InvalidArgument("SX must be flanked by RZ gates on the same qubit to invert");
    inv[k - 1].angle = detail::wrap_angle(inv[k - 1].angle + std::numbers::pi);
    inv[k + 1].angle = detail::wrap_angle(inv[k + 1].angle + std::numbers::pi);
  }
  return inv;
}

/// Local unitary folding: every slice U becomes U (U^dagger U)^((f-1)/2).
inline GateCircuit fold_slice(const GateCircuit& c, int f) {
  if (f < 1 || f % 2 == 0) throw InvalidArgument("noise factor must be an odd integer >= 1");
  GateCircuit out(c.n_qubits);
  out.global_phase = c.global_phase;  // folds add U^dagger U = identity up to phase
  for (std::size_t s = 0; s < c.n_slices(); ++s) {
    const auto [b, e] = c.slice_range(s);
    out.begin_slice();
    const auto inv = inverse_gates(c.gates, b, e);
    for (std::size_t k = b; k < e; ++k) out.gates.push_back(c.gates[k]);
    for (int rep = 0; rep < (f - 1) / 2; ++rep) {
      out.gates.insert(out.gates.end(), inv.begin(), inv.end());
      for (std::size_t k = b; k < e; ++k) out.gates.push_back(c.gates[k]);
    }
  }
  return out;
}

// --- gate counting -------------------------------------------------------------

struct GateCounts {
  std::array<std::int64_t, 5> by_kind{};

  std::int64_t& operator[](GateKind k) noexcept { return by_kind[static_cast<std::size_t>(k)]; }
  std::int64_t operator[](GateKind k) const noexcept { return by_kind[static_cast<std::size_t>(k)]; }

  std::int64_t total() const noexcept {
    std::int64_t t = 0;
    for (auto v : by_kind) t += v;
    return t;
  }

  bool operator==(const GateCounts&) const = default;
};

inline GateCounts count_gates(const std::vector<Gate>& gates, std::size_t begin, std::size_t end) {
  GateCounts n;
  for (std::size_t k = begin; k < end; ++k) ++n[gates[k].kind];
  return n;
}

inline GateCounts count_gates(const GateCircuit& c) { return count_gates(c.gates, 0, c.gates.size()); }

inline std::vector<GateCounts> count_gates_per_slice(const GateCircuit& c) {
  std::vector<GateCounts> out;
  for (std::size_t s = 0; s < c.n_slices(); ++s) {
    const auto [b, e] = c.slice_range(s);
    out.push_back(count_gates(c.gates, b, e));
  }
  return out;
}

// --- simulation ------------------------------------------------------------------

namespace detail {

inline Eigen::Matrix2cd gate_matrix_1q(const Gate& g) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  switch (g.kind) {
    case GateKind::ID: m << 1.0, 0.0, 0.0, 1.0; break;
    case GateKind::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case GateKind::SX: m << Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5), Complex(0.5, 0.5); break;
    case GateKind::RZ:
      m << std::polar(1.0, -g.angle / 2.0), 0.0, 0.0, std::polar(1.0, g.angle / 2.0);
      break;
    case GateKind::CX: throw InvalidArgument("CX is not a single-qubit gate");
  }
  return m;
}

inline std::size_t bit_of(int n_qubits, int q) { return std::size_t{1} << (n_qubits - 1 - q); }

// rho -> U rho U^dagger for a single-qubit U on the qubit with bit mask m.
inline void conjugate_1q(Complex* rho, std::size_t dim, std::size_t m, const Eigen::Matrix2cd& u) {
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t c = 0; c < dim; ++c) {
    Complex* col = rho + c * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & m) continue;
      const Complex a = col[r];
      const Complex b = col[r | m];
      col[r] = u00 * a + u01 * b;
      col[r | m] = u10 * a + u11 * b;
    }
  }
  const Complex v00 = std::conj(u00), v01 = std::conj(u01), v10 = std::conj(u10),
                v11 = std::conj(u11);
  for (std::size_t c = 0; c < dim; ++c) {
    if (c & m) continue;
    Complex* c0 = rho + c * dim;
    Complex* c1 = rho + (c | m) * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      const Complex a = c0[r];
      const Complex b = c1[r];
      c0[r] = a * v00 + b * v01;
      c1[r] = a * v10 + b * v11;
    }
  }
}

// RZ(theta) followed by the Z-flip channel with probability p.
inline void rz_with_dephasing(Complex* rho, std::size_t dim, std::size_t m, double theta, double p) {
  const double damp = 1.0 - 2.0 * p;
  const Complex up = std::polar(damp, theta);     // row bit 1, column bit 0
  const Complex down = std::polar(damp, -theta);  // row bit 0, column bit 1
  for (std::size_t c = 0; c < dim; ++c) {
    Complex* col = rho + c * dim;
    const Complex f = (c & m) ? down : up;
    const std::size_t want = (c & m) ? 0 : m;
    for (std::size_t r = 0; r < dim; ++r)
      if ((r & m) == want) col[r] *= f;
  }
}

inline void cx_permute(Complex* rho, std::size_t dim, std::size_t cm, std::size_t tm) {
  for (std::size_t c = 0; c < dim; ++c) {
    Complex* col = rho + c * dim;
    for (std::size_t r = 0; r < dim; ++r)
      if ((r & cm) && !(r & tm)) std::swap(col[r], col[r | tm]);
  }
  for (std::size_t c = 0; c < dim; ++c) {
    if (!(c & cm) || (c & tm)) continue;
    Complex* a = rho + c * dim;
    Complex* b = rho + (c | tm) * dim;
    for (std::size_t r = 0; r < dim; ++r) std::swap(a[r], b[r]);
  }
}

}  // namespace detail

/// Applies the circuit in place. After every RZ on qubit q the channel
/// rho -> (1 - p) rho + p Z_q rho Z_q acts; the flip commutes with RZ, so
/// attaching it before or after the rotation is the same channel.
inline void run_circuit(DensityState& state, const GateCircuit& c, const NoiseModel& noise) {
  if (state.n_qubits() != c.n_qubits) {
    throw DimensionError("circuit acts on " + std::to_string(c.n_qubits) + " qubits, state has " +
                         std::to_string(state.n_qubits()));
  }
  noise.validate();
  const auto dim = static_cast<std::size_t>(state.dim());
  Complex* rho = state.matrix().data();
  const int n = c.n_qubits;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::ID: break;
      case GateKind::RZ:
        detail::rz_with_dephasing(rho, dim, detail::bit_of(n, g.q0), g.angle, noise.p_zflip);
        break;
      case GateKind::CX:
        detail::cx_permute(rho, dim, detail::bit_of(n, g.q0), detail::bit_of(n, g.q1));
        break;
      case GateKind::SX:
      case GateKind::X:
        detail::conjugate_1q(rho, dim, detail::bit_of(n, g.q0), detail::gate_matrix_1q(g));
        break;
    }
  }
}

inline DensityState apply_circuit(const DensityState& state, const GateCircuit& c,
                                  const NoiseModel& noise) {
  DensityState out = state;
  run_circuit(out, c, noise);
  return out;
}

/// Noiseless action on a pure state (global phase included).
inline void run_circuit(StateVector& psi, const GateCircuit& c) {
  const auto dim = static_cast<std::size_t>(psi.size());
  if (dim != dimension_for(c.n_qubits)) throw DimensionError("state and circuit sizes differ");
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::CX) {
      const auto cm = detail::bit_of(c.n_qubits, g.q0);
      const auto tm = detail::bit_of(c.n_qubits, g.q1);
      for (std::size_t k = 0; k < dim; ++k)
        if ((k & cm) && !(k & tm)) std::swap(psi(static_cast<Eigen::Index>(k)), psi(static_cast<Eigen::Index>(k | tm)));
      continue;
    }
    const auto u = detail::gate_matrix_1q(g);
    const auto m = detail::bit_of(c.n_qubits, g.q0);
    for (std::size_t k = 0; k < dim; ++k) {
      if (k & m) continue;
      const auto i0 = static_cast<Eigen::Index>(k);
      const auto i1 = static_cast<Eigen::Index>(k | m);
      const Complex a = psi(i0), b = psi(i1);
      psi(i0) = u(0, 0) * a + u(0, 1) * b;
      psi(i1) = u(1, 0) * a + u(1, 1) * b;
    }
  }
  psi *= std::polar(1.0, c.global_phase);
}

/// Dense unitary of the noiseless circuit.
inline ComplexMatrix circuit_unitary(const GateCircuit& c) {
  const auto dim = static_cast<Eigen::Index>(dimension_for(c.n_qubits));
  ComplexMatrix u(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    StateVector e = StateVector::Zero(dim);
    e(k) = 1.0;
    run_circuit(e, c);
    u.col(k) = e;
  }
  return u;
}

// --- measurement ---------------------------------------------------------------------

/// How shot noise is modeled when `shots` is set.
///   Grouped: terms are split into qubit-wise commuting groups (one
///     measurement basis each, greedy in term order); each group is sampled
///     jointly, so its estimator variance is Var_rho(G) / shots.
///   IndependentTerms: every non-identity term is sampled on its own, with
///     variance c^2 (1 - <P>^2) / shots.
enum class ShotModel : std::uint8_t { Grouped, IndependentTerms };

/// Exact expectation values unless `shots` is set.
struct Measurement {
  std::optional<std::int64_t> shots;
  ShotModel model = ShotModel::Grouped;

  static Measurement exact() { return {}; }
  static Measurement with_shots(std::int64_t n, ShotModel model = ShotModel::Grouped) { return {n, model}; }
};

/// Partition of the non-identity terms into qubit-wise commuting groups.
inline std::vector<PauliSum> measurement_groups(const PauliSum& sum) {
  std::vector<PauliSum> groups;
  std::vector<std::vector<Pauli>> bases;
  for (const auto& t : sum.terms()) {
    if (t.is_identity()) continue;
    bool placed = false;
    for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
      auto& basis = bases[g];
      bool fits = true;
      for (std::size_t k = 0; k < basis.size() && fits; ++k) {
        fits = t.axes[k] == Pauli::I || basis[k] == Pauli::I || basis[k] == t.axes[k];
      }
      if (!fits) continue;
      for (std::size_t k = 0; k < basis.size(); ++k)
        if (t.axes[k] != Pauli::I) basis[k] = t.axes[k];
      groups[g].add(t);
      placed = true;
    }
    if (!placed) {
      groups.emplace_back(sum.n_sites());
      groups.back().add(t);
      bases.emplace_back(t.axes.begin(), t.axes.end());
    }
  }
  return groups;
}

/// Variance of the single-shot energy estimator under `model`.
inline double shot_variance(const DensityState& rho, const PauliSum& sum, ShotModel model) {
  double variance = 0.0;
  if (model == ShotModel::IndependentTerms) {
    for (const auto& t : sum.terms()) {
      if (t.is_identity()) continue;
      const double p = pauli_trace(t, rho).real();
      variance += t.coefficient * t.coefficient * std::max(0.0, 1.0 - p * p);
    }
    return variance;
  }
  for (const auto& g : measurement_groups(sum)) {
    const ComplexMatrix m = to_dense(g);
    const ComplexMatrix rm = rho.matrix() * m;
    const double mean = rm.trace().real();
    const double second = (rm * m).trace().real();
    variance += std::max(0.0, second - mean * mean);
  }
  return variance;
}

inline double measure_energy(const DensityState& rho, const PauliSum& sum, const Measurement& m,
                             Rng* rng = nullptr) {
  if (!m.shots) return expectation(sum, rho);
  if (*m.shots <= 0) throw InvalidArgument("shot count must be positive");
  if (rng == nullptr) throw InvalidArgument("shot-noise measurement needs a random generator");
  const double mean = expectation(sum, rho);
  return mean + std::sqrt(shot_variance(rho, sum, m.model) / static_cast<double>(*m.shots)) * rng->normal();
}

}  // namespace sgrec
