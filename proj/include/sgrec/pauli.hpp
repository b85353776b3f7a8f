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
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgrec/density_state.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/rng.hpp"

namespace sgrec {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::array<Pauli, 3> kNonIdentityPaulis{Pauli::X, Pauli::Y, Pauli::Z};

constexpr char to_char(Pauli p) noexcept { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case '_': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw InvalidArgument(std::string("unknown Pauli label '") + c + "'");
  }
}

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1.0, 0.0, 0.0, 1.0; break;
    case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::Y: m << 0.0, -1i, 1i, 0.0; break;
    case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

/// Weighted tensor product of single-site Paulis.
struct PauliString {
  std::vector<Pauli> axes;
  double coefficient = 1.0;

  static PauliString identity(int n_sites, double coefficient) {
    return {std::vector<Pauli>(static_cast<std::size_t>(n_sites), Pauli::I), coefficient};
  }

  static PauliString on_sites(int n_sites, std::initializer_list<std::pair<int, Pauli>> factors,
                              double coefficient) {
    PauliString s = identity(n_sites, coefficient);
    for (auto [site, p] : factors) {
      if (site < 0 || site >= n_sites) throw InvalidArgument("Pauli factor site out of range");
      s.axes[static_cast<std::size_t>(site)] = p;
    }
    return s;
  }

  /// "XIZ" style label, site 0 first.
  static PauliString parse(std::string_view label, double coefficient) {
    PauliString s{{}, coefficient};
    for (char c : label) s.axes.push_back(pauli_from_char(c));
    return s;
  }

  int n_sites() const noexcept { return static_cast<int>(axes.size()); }

  bool is_identity() const noexcept {
    for (Pauli p : axes)
      if (p != Pauli::I) return false;
    return true;
  }

  std::string label() const {
    std::string out;
    for (Pauli p : axes) out.push_back(to_char(p));
    return out;
  }

  /// Sites carrying a non-identity factor, ascending.
  std::vector<int> support() const {
    std::vector<int> out;
    for (int n = 0; n < n_sites(); ++n)
      if (axes[static_cast<std::size_t>(n)] != Pauli::I) out.push_back(n);
    return out;
  }

  // Bit masks over basis-state indices (site n lives at bit N-1-n).
  std::uint64_t flip_mask() const noexcept {
    std::uint64_t m = 0;
    for (int n = 0; n < n_sites(); ++n) {
      const Pauli p = axes[static_cast<std::size_t>(n)];
      if (p == Pauli::X || p == Pauli::Y) m |= std::uint64_t{1} << (n_sites() - 1 - n);
    }
    return m;
  }

  std::uint64_t sign_mask() const noexcept {
    std::uint64_t m = 0;
    for (int n = 0; n < n_sites(); ++n) {
      const Pauli p = axes[static_cast<std::size_t>(n)];
      if (p == Pauli::Y || p == Pauli::Z) m |= std::uint64_t{1} << (n_sites() - 1 - n);
    }
    return m;
  }

  int y_count() const noexcept {
    int c = 0;
    for (Pauli p : axes) c += (p == Pauli::Y);
    return c;
  }
};

namespace detail {

// <k ^ flip| P |k> for the unit-weight string described by the masks.
inline Complex pauli_phase(std::uint64_t k, std::uint64_t sign_mask, int y_count) {
  static constexpr std::array<Complex, 4> kIPow{Complex{1, 0}, Complex{0, 1}, Complex{-1, 0},
                                                Complex{0, -1}};
  Complex ph = kIPow[static_cast<std::size_t>(y_count & 3)];
  return (std::popcount(k & sign_mask) & 1) ? -ph : ph;
}

}  // namespace detail

/// Hermitian operator stored as a list of real-weighted Pauli strings.
///
/// `add` appends without merging; call `canonicalize` for the merged,
/// lexicographically ordered form that every circuit builder consumes.
class PauliSum {
 public:
  explicit PauliSum(int n_sites) : n_sites_(n_sites) {
    if (n_sites < 1) throw InvalidArgument("PauliSum needs at least one site");
  }

  PauliSum(int n_sites, std::vector<PauliString> terms) : PauliSum(n_sites) {
    for (auto& t : terms) add(std::move(t));
  }

  void add(PauliString term) {
    if (term.n_sites() != n_sites_) {
      throw DimensionError("term '" + term.label() + "' has " + std::to_string(term.n_sites()) +
                           " sites, sum has " + std::to_string(n_sites_));
    }
    if (!std::isfinite(term.coefficient)) throw InvalidArgument("non-finite Pauli coefficient");
    terms_.push_back(std::move(term));
  }

  void add(std::initializer_list<std::pair<int, Pauli>> factors, double coefficient) {
    add(PauliString::on_sites(n_sites_, factors, coefficient));
  }

  int n_sites() const noexcept { return n_sites_; }
  const std::vector<PauliString>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  double identity_coefficient() const noexcept {
    double c = 0.0;
    for (const auto& t : terms_)
      if (t.is_identity()) c += t.coefficient;
    return c;
  }

 private:
  int n_sites_;
  std::vector<PauliString> terms_;
};

/// Coefficients below this magnitude are dropped by `canonicalize`.
inline constexpr double kZeroCoefficient = 1e-14;

/// Merges terms with identical axes, drops negligible ones and orders the
/// rest lexicographically by axes (I < X < Y < Z, site 0 first).
inline PauliSum canonicalize(const PauliSum& sum) {
  std::map<std::vector<Pauli>, double> merged;
  for (const auto& t : sum.terms()) merged[t.axes] += t.coefficient;
  PauliSum out(sum.n_sites());
  for (auto& [axes, c] : merged)
    if (std::abs(c) >= kZeroCoefficient) out.add(PauliString{axes, c});
  return out;
}

inline ComplexMatrix to_dense(const PauliSum& sum) {
  const auto dim = dimension_for(sum.n_sites());
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : sum.terms()) {
    const auto flip = t.flip_mask();
    const auto sign = t.sign_mask();
    const int ny = t.y_count();
    for (std::uint64_t k = 0; k < dim; ++k) {
      m(static_cast<Eigen::Index>(k ^ flip), static_cast<Eigen::Index>(k)) +=
          t.coefficient * detail::pauli_phase(k, sign, ny);
    }
  }
  return m;
}

/// tr(P rho) for the unit-weight string P (coefficient ignored).
inline Complex pauli_trace(const PauliString& p, const DensityState& rho) {
  if (p.n_sites() != rho.n_qubits()) throw DimensionError("Pauli string and state sizes differ");
  const auto& m = rho.matrix();
  const auto flip = p.flip_mask();
  const auto sign = p.sign_mask();
  const int ny = p.y_count();
  Complex acc = 0.0;
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(m.rows()); ++j) {
    acc += detail::pauli_phase(j, sign, ny) *
           m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ flip));
  }
  return acc;
}

/// tr(H rho) without materializing H.
inline double expectation(const PauliSum& sum, const DensityState& rho) {
  if (sum.n_sites() != rho.n_qubits()) {
    throw DimensionError("operator acts on " + std::to_string(sum.n_sites()) +
                         " qubits, state has " + std::to_string(rho.n_qubits()));
  }
  Complex acc = 0.0;
  double scale = 1.0;
  for (const auto& t : sum.terms()) {
    acc += t.coefficient * pauli_trace(t, rho);
    scale += std::abs(t.coefficient);
  }
  if (std::abs(acc.imag()) > 1e-10 * scale) {
    throw InvalidArgument("expectation value has a non-negligible imaginary part; state is not Hermitian");
  }
  return acc.real();
}

// --- added-noise rotation --------------------------------------------------

struct RotationAngles {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
};

/// Unitary W(phi1, phi2, phi3) used to conjugate one Pauli type.
inline Eigen::Matrix2cd rotation_matrix(const RotationAngles& a) {
  const double c = std::cos(a.phi1 / 2.0);
  const double s = std::sin(a.phi1 / 2.0);
  Eigen::Matrix2cd w;
  w << c, -std::polar(1.0, a.phi3) * s, std::polar(1.0, a.phi2) * s,
      std::polar(1.0, a.phi2 + a.phi3) * c;
  return w;
}

/// One added-noise realization: an independent rotation per Pauli type.
struct NoiseRotation {
  std::array<RotationAngles, 3> angles{};  // indexed X, Y, Z
  std::uint64_t seed = 0;

  static NoiseRotation identity() { return {}; }

  /// Draws phi3 uniformly from [-1, 1] for each of X, Y, Z. phi1 and phi2 are
  /// fixed configuration values (zero gives the diagonal phase rotation).
  static NoiseRotation sample(std::uint64_t seed, int realization, double phi1 = 0.0,
                              double phi2 = 0.0) {
    NoiseRotation rot;
    rot.seed = derive_seed(seed, {0x726f74ULL, static_cast<std::uint64_t>(realization)});
    Rng rng(rot.seed);
    for (auto& a : rot.angles) a = {phi1, phi2, rng.uniform(-1.0, 1.0)};
    return rot;
  }

  const RotationAngles& for_pauli(Pauli p) const {
    if (p == Pauli::I) throw InvalidArgument("identity factors carry no rotation");
    return angles[static_cast<std::size_t>(p) - 1];
  }

  bool is_identity() const noexcept {
    for (const auto& a : angles)
      if (a.phi1 != 0.0 || a.phi2 != 0.0 || a.phi3 != 0.0) return false;
    return true;
  }
};

/// Real coefficients over {I, X, Y, Z}.
using PauliExpansion = std::array<double, 4>;

/// Expansion of W_P^dagger P W_P in the Pauli basis.
inline PauliExpansion conjugate_pauli(Pauli p, const NoiseRotation& rot) {
  if (p == Pauli::I) throw InvalidArgument("identity factors are never conjugated");
  const RotationAngles a = rot.for_pauli(p);
  if (a.phi1 == 0.0 && a.phi2 == 0.0) {
    // W is diagonal: Z is fixed, X and Y rotate by phi3.
    const double c = std::cos(a.phi3), s = std::sin(a.phi3);
    if (p == Pauli::X) return {0.0, c, -s, 0.0};
    if (p == Pauli::Y) return {0.0, s, c, 0.0};
    return {0.0, 0.0, 0.0, 1.0};
  }
  const Eigen::Matrix2cd w = rotation_matrix(a);
  const Eigen::Matrix2cd image = w.adjoint() * pauli_matrix(p) * w;
  PauliExpansion out{};
  for (int k = 0; k < 4; ++k) {
    const Complex c = (pauli_matrix(static_cast<Pauli>(k)) * image).trace() / 2.0;
    out[static_cast<std::size_t>(k)] = c.real();
  }
  return out;
}

}  // namespace sgrec
