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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sgrec/spectrum.hpp"

namespace sgrec {
namespace {

TEST(Eigensolve, SingleZSpectrum) {
  PauliSum s(1);
  s.add(PauliString::parse("Z", 1.0));
  const auto sl = eigensolve(s, 2);
  EXPECT_NEAR(sl.energies[0], -1.0, 1e-15);
  EXPECT_NEAR(sl.energies[1], 1.0, 1e-15);
}

TEST(Eigensolve, IdentityOnlySum) {
  PauliSum s(2);
  s.add(PauliString::identity(2, 3.5));
  const auto sl = eigensolve(s, 1);
  EXPECT_NEAR(sl.energies[0], 3.5, 1e-15);
  EXPECT_NEAR(sl.states[0].norm(), 1.0, 1e-14);
}

TEST(Eigensolve, MassiveModelNondegenerateAtLearningStart) {
  const auto sl = eigensolve(build_hamiltonian({6, 30.0, 10.0, 100.0}, 1.832633), 2);
  EXPECT_GT(sl.energies[1] - sl.energies[0], 0.0);
}

TEST(Eigensolve, ResidualsPhaseConventionAndGuards) {
  const auto sum = build_hamiltonian({4, 20.0, 1.0, 100.0}, 0.3);
  const auto h = to_dense(sum);
  const auto sl = eigensolve(sum, 6);
  const double norm = h.norm();
  for (std::size_t a = 0; a < sl.energies.size(); ++a) {
    if (a > 0) {
      EXPECT_GE(sl.energies[a], sl.energies[a - 1]);
    }
    EXPECT_LT((h * sl.states[a] - sl.energies[a] * sl.states[a]).norm(), 1e-10 * norm);
    Eigen::Index big = 0;
    sl.states[a].cwiseAbs().maxCoeff(&big);
    EXPECT_NEAR(sl.states[a](big).imag(), 0.0, 1e-14);
    EXPECT_GT(sl.states[a](big).real(), 0.0);
  }
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  EXPECT_THROW(eigensolve_dense(bad, 1), InvalidArgument);
  EXPECT_THROW(eigensolve(sum, 0), InvalidArgument);
  EXPECT_THROW(eigensolve(sum, 17), InvalidArgument);
}

TEST(IdealLines, MasslessPresetNeverCrossesAndGapMinimumMatchesReference) {
  const auto p = preset_for_mass(0.0);
  const auto grid = uniform_grid(p.domain.l0_min, p.domain.l0_max, 201);
  const auto t = ideal_lines(p.model, p.domain, grid);
  EXPECT_EQ(count_crossings(t), 0);
  EXPECT_FALSE(locate_crossing(t).has_value());
  const auto g = locate_min_gap(p.model, p.domain.l0_min, p.domain.l0_max);
  EXPECT_NEAR(g.l0, 0.512360, 2e-4);
  EXPECT_GT(g.gap, 0.0);
}

TEST(IdealLines, MassivePresetCrossesOnceInPredictionRegion) {
  const auto p = preset_for_mass(10.0);
  const auto grid = uniform_grid(p.domain.l0_min, p.domain.l0_max, 101);
  const auto t = ideal_lines(p.model, p.domain, grid);
  ASSERT_EQ(count_crossings(t), 1);
  const auto x = locate_crossing(t);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR(*x, 1.833466, 2e-4);
  EXPECT_TRUE(p.domain.in_prediction(*x));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (p.domain.in_learning(grid[j])) {
      EXPECT_LT(t.lines[0][j], t.lines[1][j]);
    }
  }
}

TEST(IdealLines, SinglePointGridGivesSortedEigenvalues) {
  const auto p = preset_for_mass(10.0);
  const auto t = ideal_lines(p.model, p.domain, {p.domain.l0_min});
  const auto sl = eigensolve(build_hamiltonian(p.model, p.domain.l0_min), 2);
  EXPECT_EQ(t.lines[0][0], sl.energies[0]);
  EXPECT_EQ(t.lines[1][0], sl.energies[1]);
}

TEST(IdealLines, RejectsGridsOutsideDomainOrUnsorted) {
  const auto p = preset_for_mass(0.0);
  EXPECT_THROW(ideal_lines(p.model, p.domain, {p.domain.l0_min - 0.1}), InvalidArgument);
  EXPECT_THROW(ideal_lines(p.model, p.domain, {p.domain.l0_max, p.domain.l0_min}), InvalidArgument);
}

TEST(IdealLines, TrackedEnergiesArePermutationsAndContinuous) {
  for (double mg : {0.0, 10.0}) {
    const auto p = preset_for_mass(mg);
    const auto grid = uniform_grid(p.domain.l0_min, p.domain.l0_max, 51);
    const auto t = ideal_lines(p.model, p.domain, grid);
    EXPECT_GE(t.min_overlap, kTrackingOverlap);
    const double c = field_derivative_bound(p.model, p.domain.l0_max);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      auto sorted = eigensolve(build_hamiltonian(p.model, grid[j]), 2).energies;
      std::vector<double> tracked{t.lines[0][j], t.lines[1][j]};
      std::sort(tracked.begin(), tracked.end());
      EXPECT_NEAR(tracked[0], sorted[0], 1e-12);
      EXPECT_NEAR(tracked[1], sorted[1], 1e-12);
      if (j > 0) {
        for (int a = 0; a < 2; ++a) {
          EXPECT_LE(std::abs(t.lines[a][j] - t.lines[a][j - 1]), c * (grid[j] - grid[j - 1]) + 1e-12);
        }
      }
    }
  }
}

TEST(InitialState, EigenpairResidualAndEnergy) {
  for (double mg : {0.0, 10.0}) {
    const auto p = preset_for_mass(mg);
    const auto sum = build_hamiltonian(p.model, p.domain.l0_min);
    const auto h = to_dense(sum);
    const auto sl = eigensolve(sum, 2);
    for (int a = 0; a < 2; ++a) {
      const auto v = prepare_initial_state(p.model, p.domain.l0_min, a);
      EXPECT_NEAR(v.norm(), 1.0, 1e-12);
      EXPECT_LT((h * v - sl.energies[static_cast<std::size_t>(a)] * v).norm(), 1e-9);
      EXPECT_NEAR(expectation(sum, DensityState::pure(v)), sl.energies[static_cast<std::size_t>(a)], 1e-10);
    }
    EXPECT_GT(sl.energies[1], sl.energies[0]);
  }
}

TEST(InitialState, DegenerateLevelsRejected) {
  // Two sites, vanishing hopping: |01> and |10> are degenerate at l0 = -1/2.
  const ModelParams p{2, 1e12, 0.0, 10.0};
  EXPECT_THROW(prepare_initial_state(p, -0.5, 0), DegeneracyError);
  EXPECT_THROW(prepare_initial_state(p, 0.0, 2), InvalidArgument);
}

TEST(Spectrum, EigenvaluesMatchOracle) {
  const auto p = preset_for_mass(10.0);
  const auto sl = eigensolve(build_hamiltonian(p.model, 1.8331), 4);
  const Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::schwinger_dense(6, 30.0, 10.0, 100.0, 1.8331));
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(sl.energies[static_cast<std::size_t>(a)], es.eigenvalues()(a), 1e-10);
}

}  // namespace
}  // namespace sgrec
