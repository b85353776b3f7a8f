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
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sgrec/errors.hpp"
#include "sgrec/parallel.hpp"
#include "sgrec/pauli.hpp"
#include "sgrec/schwinger.hpp"

namespace sgrec {

/// Lowest eigenpairs of a Hamiltonian at one background field.
struct SpectrumSlice {
  double l0 = 0.0;
  std::vector<double> energies;     // ascending
  std::vector<StateVector> states;  // orthonormal, matching energies
};

/// Rotates v so that its largest-magnitude component (first one on ties) is
/// real and positive.
inline void fix_phase(StateVector& v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v(k));
    if (mag > best_mag * (1.0 + 1e-12) + 1e-300) {
      best_mag = mag;
      best = k;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v(best)) / best_mag;
}

inline SpectrumSlice eigensolve_dense(const ComplexMatrix& h, int k, double l0 = 0.0) {
  if (h.rows() != h.cols()) throw DimensionError("matrix is not square");
  if (h.rows() > (Eigen::Index{1} << kMaxDenseQubits)) throw DimensionError("matrix too large");
  if (k < 1 || k > h.rows()) throw InvalidArgument("requested eigenpair count out of range");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("eigensolve requires a Hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
  SpectrumSlice out;
  out.l0 = l0;
  for (int a = 0; a < k; ++a) {
    out.energies.push_back(es.eigenvalues()(a));
    StateVector v = es.eigenvectors().col(a);
    fix_phase(v);
    out.states.push_back(std::move(v));
  }
  return out;
}

/// k lowest eigenpairs of a Pauli sum by dense diagonalization.
inline SpectrumSlice eigensolve(const PauliSum& sum, int k, double l0 = 0.0) {
  return eigensolve_dense(to_dense(sum), k, l0);
}

/// Energies of levels followed by eigenvector continuity along a grid.
/// lines[a][j] is the energy of level a at grid[j]; level a is the a-th
/// lowest state at grid[0].
struct TrackedLines {
  std::vector<double> grid;
  std::vector<std::vector<double>> lines;
  std::vector<std::vector<StateVector>> states;  // [a][j]
  double min_overlap = 1.0;                      // smallest accepted |<prev|cur>|^2
};

/// Minimum squared overlap accepted when continuing a level to the next grid
/// point.
inline constexpr double kTrackingOverlap = 0.5;

/// Follows the n_levels lowest states across `grid` by maximal overlap with
/// the previous grid point. Lines are free to cross.
inline TrackedLines track_levels(const ModelParams& params, const std::vector<double>& grid,
                                 int n_levels = 2, int workers = 1) {
  if (grid.empty()) throw InvalidArgument("empty l0 grid");
  if (n_levels < 1 || n_levels > 6) throw InvalidArgument("n_levels must be in [1, 6]");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (grid[j] < grid[j - 1]) throw InvalidArgument("l0 grid must be ascending");
  }
  std::vector<SpectrumSlice> slices(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t j) {
    slices[j] = eigensolve(build_hamiltonian(params, grid[j]), n_levels, grid[j]);
  });

  TrackedLines out;
  out.grid = grid;
  out.lines.assign(static_cast<std::size_t>(n_levels), {});
  out.states.assign(static_cast<std::size_t>(n_levels), {});
  for (int a = 0; a < n_levels; ++a) {
    out.lines[a].push_back(slices[0].energies[a]);
    out.states[a].push_back(slices[0].states[a]);
  }

  std::vector<int> perm(static_cast<std::size_t>(n_levels));
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const auto& cur = slices[j];
    std::vector<std::vector<double>> ov(perm.size(), std::vector<double>(perm.size()));
    for (int a = 0; a < n_levels; ++a)
      for (int b = 0; b < n_levels; ++b)
        ov[a][b] = std::norm(out.states[a].back().dot(cur.states[b]));

    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (int a = 0; a < n_levels; ++a) score += ov[a][perm[a]];
      if (score > best_score + 1e-15) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (int a = 0; a < n_levels; ++a) {
      const double o = ov[a][best[a]];
      if (o < kTrackingOverlap) {
        throw TrackingError("level " + std::to_string(a) + " ambiguous at l0 = " +
                            std::to_string(grid[j]) + " (overlap " + std::to_string(o) + ")");
      }
      out.min_overlap = std::min(out.min_overlap, o);
      StateVector v = cur.states[best[a]];
      // Keep the phase continuous so the next overlap compares like with like.
      const Complex c = out.states[a].back().dot(v);
      if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
      out.lines[a].push_back(cur.energies[best[a]]);
      out.states[a].push_back(std::move(v));
    }
  }
  return out;
}

/// Ideal lines for levels 0 and 1 over a grid inside the domain.
inline TrackedLines ideal_lines(const ModelParams& params, const DomainSpec& d,
                                const std::vector<double>& grid, int workers = 1) {
  const double tol = d.boundary_tolerance();
  for (double l0 : grid) {
    if (l0 < d.l0_min - tol || l0 > d.l0_max + tol) {
      throw InvalidArgument("grid point " + std::to_string(l0) + " outside [l0_min, l0_max]");
    }
  }
  return track_levels(params, grid, 2, workers);
}

/// Uniform grid with `n_points` points covering [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, int n_points) {
  if (n_points < 1) throw InvalidArgument("grid needs at least one point");
  std::vector<double> g;
  if (n_points == 1) return {lo};
  for (int j = 0; j < n_points; ++j) {
    g.push_back(j + 1 == n_points ? hi : std::lerp(lo, hi, static_cast<double>(j) / (n_points - 1)));
  }
  return g;
}

/// Degeneracy tolerance used to decide whether a level is well defined.
inline constexpr double kDegeneracyTolerance = 1e-9;

/// Eigenvector of H(l0) for level alpha.
inline StateVector prepare_initial_state(const ModelParams& params, double l0, int alpha) {
  if (alpha < 0 || alpha > 1) throw InvalidArgument("alpha must be 0 or 1");
  const auto slice = eigensolve(build_hamiltonian(params, l0), alpha + 2, l0);
  const auto& e = slice.energies;
  const auto a = static_cast<std::size_t>(alpha);
  if (e[a + 1] - e[a] < kDegeneracyTolerance || (a > 0 && e[a] - e[a - 1] < kDegeneracyTolerance)) {
    throw DegeneracyError("level " + std::to_string(alpha) + " is degenerate at l0 = " +
                          std::to_string(l0));
  }
  return slice.states[a];
}

// --- spectral features ---------------------------------------------------------

/// l0 at which tracked lines 0 and 1 cross, linearly interpolated between the
/// bracketing grid points; nullopt if E_0 - E_1 keeps its sign.
inline std::optional<double> locate_crossing(const TrackedLines& t) {
  if (t.lines.size() < 2) return std::nullopt;
  const auto& e0 = t.lines[0];
  const auto& e1 = t.lines[1];
  for (std::size_t j = 1; j < t.grid.size(); ++j) {
    const double d0 = e0[j - 1] - e1[j - 1];
    const double d1 = e0[j] - e1[j];
    if (d0 == 0.0) return t.grid[j - 1];
    if ((d0 < 0.0) != (d1 < 0.0) && d1 != 0.0) {
      return t.grid[j - 1] + (t.grid[j] - t.grid[j - 1]) * d0 / (d0 - d1);
    }
    if (d1 == 0.0) return t.grid[j];
  }
  return std::nullopt;
}

/// Number of sign changes of E_0 - E_1 along the tracked lines.
inline int count_crossings(const TrackedLines& t) {
  int n = 0;
  for (std::size_t j = 1; j < t.grid.size(); ++j) {
    const double d0 = t.lines[0][j - 1] - t.lines[1][j - 1];
    const double d1 = t.lines[0][j] - t.lines[1][j];
    if ((d0 < 0.0) != (d1 < 0.0)) ++n;
  }
  return n;
}

struct GapMinimum {
  double l0 = 0.0;
  double gap = 0.0;
};

/// Gap between the two lowest sorted eigenvalues.
inline double spectral_gap(const ModelParams& params, double l0) {
  const auto s = eigensolve(build_hamiltonian(params, l0), 2, l0);
  return s.energies[1] - s.energies[0];
}

/// Minimal gap on [lo, hi]: coarse scan over `n_scan` points, then
/// golden-section refinement inside the best bracket.
inline GapMinimum locate_min_gap(const ModelParams& params, double lo, double hi,
                                 int n_scan = 201, double tol = 1e-10, int workers = 1) {
  const auto grid = uniform_grid(lo, hi, n_scan);
  std::vector<double> gaps(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t j) { gaps[j] = spectral_gap(params, grid[j]); });
  const auto jmin = static_cast<std::size_t>(
      std::distance(gaps.begin(), std::min_element(gaps.begin(), gaps.end())));
  double a = grid[jmin == 0 ? 0 : jmin - 1];
  double b = grid[std::min(jmin + 1, grid.size() - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = spectral_gap(params, c);
  double fd = spectral_gap(params, d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = spectral_gap(params, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = spectral_gap(params, d);
    }
  }
  const double x = 0.5 * (a + b);
  GapMinimum best{x, spectral_gap(params, x)};
  if (gaps[jmin] < best.gap) best = {grid[jmin], gaps[jmin]};
  return best;
}

}  // namespace sgrec
