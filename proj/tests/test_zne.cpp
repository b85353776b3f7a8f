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

#include <random>

#include "oracles.hpp"
#include "sgrec/zne.hpp"

namespace sgrec {
namespace {

EnergyLine line_at(int f, const std::vector<double>& e, int alpha = 0) {
  const RampSchedule s{0.0, 1.0, 10.0, static_cast<int>(e.size()) - 1, 0};
  EnergyLine l{alpha, s, Variant::zne(f), {}};
  for (int i = 0; i <= s.n_steps; ++i) l.samples.push_back({i, s.time_at(i), s.l0_at(i), e[static_cast<std::size_t>(i)]});
  return l;
}

TEST(Extrapolate, TwoPoints) { EXPECT_NEAR(extrapolate_point({{1, 3}, {2.0, 2.2}}), 1.9, 1e-12); }

TEST(Extrapolate, ConstantSeries) {
  EXPECT_DOUBLE_EQ(extrapolate_point({{1, 3, 5, 7}, {-4.25, -4.25, -4.25, -4.25}}), -4.25);
}

TEST(Extrapolate, MatchesNormalEquationsOracle) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    ZneSeries s{noise_factors(5), {}};
    std::vector<double> x;
    for (int f : s.factors) {
      s.energies.push_back(u(g));
      x.push_back(f);
    }
    EXPECT_NEAR(extrapolate_point(s), oracle::line_intercept(x, s.energies), 1e-12);
  }
}

TEST(Extrapolate, ExactOnAffineData) {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 2; n <= 10; ++n) {
    const double a = u(g), b = u(g);
    ZneSeries s{noise_factors(n), {}};
    for (int f : s.factors) s.energies.push_back(a + b * f);
    EXPECT_NEAR(extrapolate_point(s), a, 1e-12);
  }
}

TEST(Extrapolate, RejectsShortOrMismatchedSeries) {
  EXPECT_THROW(extrapolate_point({{1}, {1.0}}), InvalidArgument);
  EXPECT_THROW(extrapolate_point({{1, 3}, {1.0}}), InvalidArgument);
  EXPECT_THROW(extrapolate_point({{3, 3}, {1.0, 2.0}}), InvalidArgument);
  EXPECT_THROW(noise_factors(1), InvalidArgument);
}

TEST(NoiseFactors, OddAscendingFromOne) {
  EXPECT_EQ(noise_factors(2), (std::vector<int>{1, 3}));
  EXPECT_EQ(noise_factors(10).back(), 19);
  EXPECT_EQ(noise_factors(10).size(), 10U);
}

TEST(MitigateLineZne, PointwiseExtrapolation) {
  const auto l1 = line_at(1, {1.0, 2.0, 3.0});
  const auto l3 = line_at(3, {1.2, 2.6, 3.0});
  const auto m = mitigate_line_zne({l1, l3}, 0);
  EXPECT_EQ(m.variant.kind, VariantKind::ZneMitigated);
  EXPECT_NEAR(m.samples[0].energy, 0.9, 1e-12);
  EXPECT_NEAR(m.samples[1].energy, 1.7, 1e-12);
  EXPECT_NEAR(m.samples[2].energy, 3.0, 1e-12);
  EXPECT_EQ(m.samples[1].l0, l1.samples[1].l0);
}

TEST(MitigateLineZne, NoiselessLinesReturnIdealCircuitLine) {
  const auto p = reduced_preset();
  const auto s = main_schedule(p.domain, 10.0, 30);
  EvolutionConfig cfg;
  cfg.noise_p = 0.0;
  const auto ideal = evolve_line(p.model, s, Variant::ideal_circuit(), 1, cfg);
  std::vector<EnergyLine> lines;
  for (int f : noise_factors(3)) lines.push_back(evolve_line(p.model, s, Variant::zne(f), 1, cfg));
  const auto m = mitigate_line_zne(lines, 1);
  for (std::size_t i = 0; i < m.samples.size(); ++i) EXPECT_NEAR(m.samples[i].energy, ideal.samples[i].energy, 1e-9);
}

TEST(MitigateLineZne, ReducesErrorOfNoisyLine) {
  const auto p = reduced_preset();
  const auto s = main_schedule(p.domain, 10.0, 100);
  EvolutionConfig cfg;
  const auto ideal = ideal_ed_line(p.model, s, 0);
  std::vector<EnergyLine> lines;
  for (int f : noise_factors(3)) lines.push_back(evolve_line(p.model, s, Variant::zne(f), 0, cfg));
  const auto m = mitigate_line_zne(lines, 0);
  double e_noisy = 0.0, e_zne = 0.0;
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    e_noisy += std::pow(lines[0].samples[i].energy - ideal.samples[i].energy, 2);
    e_zne += std::pow(m.samples[i].energy - ideal.samples[i].energy, 2);
  }
  EXPECT_LT(e_zne, e_noisy);
}

TEST(MitigateLineZne, RejectsInconsistentInputs) {
  const auto l1 = line_at(1, {1.0, 2.0});
  EXPECT_THROW(mitigate_line_zne({l1}, 0), InvalidArgument);
  EXPECT_THROW(mitigate_line_zne({l1, line_at(5, {1.0, 2.0})}, 0), InvalidArgument);
  EXPECT_THROW(mitigate_line_zne({l1, line_at(3, {1.0, 2.0, 3.0})}, 0), InvalidArgument);
  EXPECT_THROW(mitigate_line_zne({l1, line_at(3, {1.0, 2.0}, 1)}, 0), InvalidArgument);
}

}  // namespace
}  // namespace sgrec
