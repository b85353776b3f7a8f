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
#include <random>

#include "oracles.hpp"
#include "sgrec/grec.hpp"

namespace sgrec {
namespace {

constexpr int kSteps = 20;

const DomainSpec kDomain{0.0, 1.0, 1.5, 2.0};

EnergyLine make_line(int alpha, const RampSchedule& s, Variant v, const std::vector<double>& e) {
  EnergyLine line{alpha, s, v, {}};
  for (int i = 0; i <= s.n_steps; ++i) line.samples.push_back({i, s.time_at(i), s.l0_at(i), e[static_cast<std::size_t>(i)]});
  return line;
}

RampSchedule training_ramp(int tau) { return RampSchedule{0.0, 1.0 - 0.1 * (tau - 1), 10.0, kSteps, tau}; }

std::vector<double> random_values(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(kSteps + 1);
  for (auto& x : v) x = u(g);
  return v;
}

// Training set whose noisy realization r is transform(ideal, r).
template <class F>
TrainingSet build_set(int alpha, int n_train, int realizations, std::mt19937_64& g, F noisy_of) {
  TrainingSet ts{alpha, {}};
  for (int tau = 1; tau <= n_train; ++tau) {
    const auto s = training_ramp(tau);
    const auto ideal = random_values(g);
    TrainingLine tl{make_line(alpha, s, Variant::ideal_ed(), ideal), {}};
    for (int r = 1; r <= realizations; ++r) {
      tl.noisy.push_back(make_line(alpha, s, Variant::added_noise(r), noisy_of(ideal, r, g)));
    }
    ts.lines.push_back(std::move(tl));
  }
  return ts;
}

TEST(FitEtas, PerfectDataRecoversIdentity) {
  std::mt19937_64 g(1);
  const auto ts = build_set(0, 2, 1, g, [](const auto& v, int, auto&) { return v; });
  for (int i = 0; i <= kSteps; ++i) {
    const auto row = fit_etas(ts, i);
    EXPECT_NEAR(row.eta[1], 1.0, 1e-10);
    EXPECT_NEAR(row.eta[0], 0.0, 1e-10);
    EXPECT_LT(row.residual, 1e-10);
  }
}

TEST(FitEtas, ConstantOffsetIsAbsorbed) {
  std::mt19937_64 g(2);
  const double c = 0.37;
  const auto ts = build_set(1, 2, 1, g, [c](auto v, int, auto&) {
    for (auto& x : v) x += c;
    return v;
  });
  for (int i = 0; i <= kSteps; ++i) {
    const auto row = fit_etas(ts, i);
    EXPECT_NEAR(row.eta[1], 1.0, 1e-10);
    EXPECT_NEAR(row.eta[0], -c, 1e-10);
  }
}

TEST(FitEtas, MatchesNormalEquationsOracle) {
  std::mt19937_64 g(3);
  int instances = 0;
  for (int R = 1; R <= 3; ++R) {
    for (int n_train = R + 1; n_train <= 11; ++n_train) {
      const int reps = R == 1 && n_train == 11 ? 10 : 4;
      for (int k = 0; k < reps; ++k, ++instances) {
        const auto ts = build_set(0, n_train, R, g, [](const auto&, int, auto& gen) { return random_values(gen); });
        const int i = static_cast<int>(g() % (kSteps + 1));
        Eigen::MatrixXd a(n_train, R + 1);
        Eigen::VectorXd b(n_train);
        for (int t = 0; t < n_train; ++t) {
          const auto& tl = ts.lines[static_cast<std::size_t>(t)];
          a(t, 0) = 1.0;
          for (int r = 1; r <= R; ++r) a(t, r) = tl.noisy[static_cast<std::size_t>(r - 1)].samples[static_cast<std::size_t>(i)].energy;
          b(t) = tl.ideal.samples[static_cast<std::size_t>(i)].energy;
        }
        const Eigen::VectorXd want = oracle::normal_equations(a, b);
        const auto row = fit_etas(ts, i);
        ASSERT_EQ(row.eta.size(), static_cast<std::size_t>(R + 1));
        ASSERT_EQ(row.rank, R + 1);
        for (int r = 0; r <= R; ++r) EXPECT_NEAR(row.eta[static_cast<std::size_t>(r)], want(r), 1e-10);
        EXPECT_NEAR(row.residual, (a * want - b).norm(), 1e-10);
      }
    }
  }
  EXPECT_GE(instances, 100);
}

TEST(FitEtas, ExactRecoveryWhenCoefficientsExist) {
  std::mt19937_64 g(4);
  for (int R = 1; R <= 3; ++R) {
    // ideal = 0.3 + sum_r w_r noisy_r with noisy random
    const std::vector<double> w{0.3, 0.8, -0.4, 1.7};
    TrainingSet ts{0, {}};
    for (int tau = 1; tau <= 6; ++tau) {
      const auto s = training_ramp(tau);
      TrainingLine tl;
      std::vector<double> ideal(kSteps + 1, w[0]);
      for (int r = 1; r <= R; ++r) {
        const auto v = random_values(g);
        for (std::size_t i = 0; i < v.size(); ++i) ideal[i] += w[static_cast<std::size_t>(r)] * v[i];
        tl.noisy.push_back(make_line(0, s, Variant::added_noise(r), v));
      }
      tl.ideal = make_line(0, s, Variant::ideal_ed(), ideal);
      ts.lines.push_back(std::move(tl));
    }
    const auto table = fit_eta_table(ts);
    for (int i = 0; i <= kSteps; ++i) EXPECT_LT(table.row(0, i).residual, 1e-10);
    for (const auto& tl : ts.lines) {
      const auto m = mitigate_line(tl.noisy, table, 0);
      for (int i = 0; i <= kSteps; ++i) {
        EXPECT_NEAR(m.samples[static_cast<std::size_t>(i)].energy, tl.ideal.samples[static_cast<std::size_t>(i)].energy, 1e-10);
      }
    }
  }
}

TEST(FitEtas, AffineEquivariance) {
  std::mt19937_64 g(5);
  const auto ts = build_set(0, 7, 1, g, [](const auto& v, int, auto& gen) {
    auto out = random_values(gen, -0.1, 0.1);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += 1.1 * v[i];
    return out;
  });
  const auto main = make_line(0, RampSchedule{0.0, 2.0, 10.0, kSteps, 0}, Variant::added_noise(1), random_values(g));
  const double c = -2.5;
  auto shifted = ts;
  for (auto& tl : shifted.lines)
    for (auto& s : tl.noisy[0].samples) s.energy += c;
  auto main_shifted = main;
  for (auto& s : main_shifted.samples) s.energy += c;

  const auto t0 = fit_eta_table(ts);
  const auto t1 = fit_eta_table(shifted);
  const auto m0 = mitigate_line({main}, t0, 0);
  const auto m1 = mitigate_line({main_shifted}, t1, 0);
  for (int i = 0; i <= kSteps; ++i) {
    EXPECT_NEAR(t1.at(0, i, 1), t0.at(0, i, 1), 1e-10);
    EXPECT_NEAR(t1.at(0, i, 0), t0.at(0, i, 0) - c * t0.at(0, i, 1), 1e-9);
    EXPECT_NEAR(m1.samples[static_cast<std::size_t>(i)].energy, m0.samples[static_cast<std::size_t>(i)].energy, 1e-9);
  }
}

TEST(FitEtas, TimePointsAreIndependent) {
  std::mt19937_64 g(6);
  const auto ts = build_set(0, 5, 2, g, [](const auto&, int, auto& gen) { return random_values(gen); });
  std::vector<int> perm(kSteps + 1);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), g);
  auto permuted = ts;
  auto permute = [&](EnergyLine& l, const EnergyLine& src) {
    for (int i = 0; i <= kSteps; ++i) {
      l.samples[static_cast<std::size_t>(i)].energy = src.samples[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])].energy;
    }
  };
  for (std::size_t t = 0; t < ts.lines.size(); ++t) {
    permute(permuted.lines[t].ideal, ts.lines[t].ideal);
    for (std::size_t r = 0; r < ts.lines[t].noisy.size(); ++r) permute(permuted.lines[t].noisy[r], ts.lines[t].noisy[r]);
  }
  const auto a = fit_eta_table(ts);
  const auto b = fit_eta_table(permuted);
  for (int i = 0; i <= kSteps; ++i) {
    for (int r = 0; r <= 2; ++r) EXPECT_EQ(b.at(0, i, r), a.at(0, perm[static_cast<std::size_t>(i)], r));
  }
  // perturbing one time point leaves the others untouched
  auto bumped = ts;
  bumped.lines[0].ideal.samples[3].energy += 1.0;
  const auto c = fit_eta_table(bumped);
  for (int i = 0; i <= kSteps; ++i) {
    if (i == 3) continue;
    for (int r = 0; r <= 2; ++r) EXPECT_EQ(c.at(0, i, r), a.at(0, i, r));
  }
}

TEST(FitEtas, RankDeficientGivesMinimumNorm) {
  // all noisy values equal: columns [1, v] are collinear
  std::mt19937_64 g(7);
  const double v = 2.0;
  const auto ts = build_set(0, 4, 1, g, [v](const auto&, int, auto&) { return std::vector<double>(kSteps + 1, v); });
  for (int i = 0; i <= kSteps; ++i) {
    const auto row = fit_etas(ts, i);
    EXPECT_EQ(row.rank, 1);
    double mean = 0.0;
    for (const auto& tl : ts.lines) mean += tl.ideal.samples[static_cast<std::size_t>(i)].energy;
    mean /= 4.0;
    // eta0 + v eta1 = mean with minimal norm: eta = mean (1, v) / (1 + v^2)
    EXPECT_NEAR(row.eta[0], mean / (1 + v * v), 1e-10);
    EXPECT_NEAR(row.eta[1], mean * v / (1 + v * v), 1e-10);
  }
}

TEST(FitEtas, RejectsUnderdeterminedAndInconsistentSets) {
  std::mt19937_64 g(8);
  const auto one = build_set(0, 1, 1, g, [](const auto& v, int, auto&) { return v; });
  EXPECT_THROW(fit_etas(one, 0), InvalidArgument);
  const auto r2 = build_set(0, 2, 2, g, [](const auto& v, int, auto&) { return v; });
  EXPECT_THROW(fit_etas(r2, 0), InvalidArgument);
  auto ts = build_set(0, 3, 1, g, [](const auto& v, int, auto&) { return v; });
  EXPECT_THROW(fit_etas(ts, kSteps + 1), InvalidArgument);
  ts.lines[1].ideal.samples.pop_back();
  EXPECT_THROW(fit_etas(ts, 0), InvalidArgument);
}

TEST(MitigateLine, IdentityCoefficientsReturnNoisyLine) {
  std::mt19937_64 g(9);
  const auto main = make_line(1, RampSchedule{0.0, 2.0, 10.0, kSteps, 0}, Variant::added_noise(1), random_values(g));
  EtaTable t(1);
  for (int i = 0; i <= kSteps; ++i) t.set(1, i, EtaRow{{0.0, 1.0}, 0.0, 2});
  const auto m = mitigate_line({main}, t, 1);
  EXPECT_EQ(m.variant.kind, VariantKind::GrecMitigated);
  for (int i = 0; i <= kSteps; ++i) {
    EXPECT_EQ(m.samples[static_cast<std::size_t>(i)].energy, main.samples[static_cast<std::size_t>(i)].energy);
    EXPECT_EQ(m.samples[static_cast<std::size_t>(i)].l0, main.samples[static_cast<std::size_t>(i)].l0);
  }
}

TEST(MitigateLine, PerfectDataConsistency) {
  std::mt19937_64 g(10);
  const auto ts = build_set(0, 3, 1, g, [](const auto& v, int, auto&) { return v; });
  const auto t = fit_eta_table(ts);
  const auto ideal = random_values(g);
  const RampSchedule s{0.0, 2.0, 10.0, kSteps, 0};
  const auto m = mitigate_line({make_line(0, s, Variant::added_noise(1), ideal)}, t, 0);
  for (int i = 0; i <= kSteps; ++i) EXPECT_NEAR(m.samples[static_cast<std::size_t>(i)].energy, ideal[static_cast<std::size_t>(i)], 1e-10);
}

TEST(MitigateLine, MissingRowThrows) {
  std::mt19937_64 g(11);
  const auto main = make_line(0, RampSchedule{0.0, 2.0, 10.0, kSteps, 0}, Variant::added_noise(1), random_values(g));
  EtaTable t(1);
  for (int i = 0; i < kSteps; ++i) t.set(0, i, EtaRow{{0.0, 1.0}, 0.0, 2});
  EXPECT_THROW(mitigate_line({main}, t, 0), InvalidArgument);
  EXPECT_THROW(mitigate_line({main}, t, 1), InvalidArgument);
  EXPECT_THROW(mitigate_line({}, t, 0), InvalidArgument);
}

TEST(EtaTable, UnusedRealizationsAreZero) {
  EtaTable t(3);
  t.set(0, 0, EtaRow{{0.5, 1.0}, 0.0, 2});
  EXPECT_EQ(t.at(0, 0, 2), 0.0);
  EXPECT_EQ(t.at(0, 0, 3), 0.0);
  EXPECT_FALSE(t.has(0, 1));
  EXPECT_FALSE(t.has(1, 0));
  EXPECT_THROW(EtaTable(0), InvalidArgument);
}

std::vector<GrecLevelData> synthetic_levels(std::mt19937_64& g) {
  // noisy = 0.9 ideal + 0.05 with small jitter
  std::vector<GrecLevelData> out;
  for (int a : {0, 1}) {
    GrecLevelData lv;
    lv.training = build_set(a, 11, 1, g, [](const auto& v, int, auto& gen) {
      auto j = random_values(gen, -1e-3, 1e-3);
      for (std::size_t i = 0; i < v.size(); ++i) j[i] += 0.9 * v[i] + 0.05;
      return j;
    });
    const RampSchedule s{0.0, 2.0, 10.0, kSteps, 0};
    const auto ideal = random_values(g);
    std::vector<double> noisy(ideal.size());
    for (std::size_t i = 0; i < ideal.size(); ++i) noisy[i] = 0.9 * ideal[i] + 0.05;
    lv.main_ideal = make_line(a, s, Variant::ideal_ed(), ideal);
    lv.main_noisy = {make_line(a, s, Variant::added_noise(1), noisy)};
    out.push_back(std::move(lv));
  }
  return out;
}

TEST(Sweep, CoversTheTrainingRange) {
  std::mt19937_64 g(12);
  const auto levels = synthetic_levels(g);
  const auto sweep = sweep_training_lines(levels, kDomain, 2, 11);
  ASSERT_EQ(sweep.size(), 10U);
  EXPECT_EQ(sweep.front().n_train, 2);
  EXPECT_EQ(sweep.front().n_evol, 3);
  EXPECT_EQ(sweep.back().n_train, 11);
  for (const auto& p : sweep) {
    EXPECT_EQ(p.mitigated.size(), 2U);
    EXPECT_LT(p.error_prediction, 1e-2);
    EXPECT_GE(p.error_prediction, 0.0);
  }
  EXPECT_THROW(sweep_training_lines(levels, kDomain, 3, 2), InvalidArgument);
  EXPECT_THROW(sweep_training_lines({}, kDomain, 2, 11), InvalidArgument);
}

TEST(Sweep, NearestSelectionPrefersLargestEndpoints) {
  std::mt19937_64 g(13);
  auto ts = build_set(0, 11, 1, g, [](const auto& v, int, auto&) { return v; });
  std::shuffle(ts.lines.begin(), ts.lines.end(), g);
  const auto sel = nearest_to_prediction(ts, 3);
  ASSERT_EQ(sel.lines.size(), 3U);
  EXPECT_EQ(sel.lines[0].ideal.schedule.tau, 1);
  EXPECT_EQ(sel.lines[1].ideal.schedule.tau, 2);
  EXPECT_EQ(sel.lines[2].ideal.schedule.tau, 3);
  EXPECT_THROW(nearest_to_prediction(ts, 12), InvalidArgument);
  EXPECT_THROW(nearest_to_prediction(ts, 0), InvalidArgument);
}

TEST(Sweep, CustomSelectorHook) {
  std::mt19937_64 g(14);
  const auto levels = synthetic_levels(g);
  int calls = 0;
  const TrainingSelector first = [&](const TrainingSet& all, int n) {
    ++calls;
    TrainingSet out{all.alpha, {all.lines.begin(), all.lines.begin() + n}};
    return out;
  };
  const auto sweep = sweep_training_lines(levels, kDomain, 2, 4, first);
  EXPECT_EQ(sweep.size(), 3U);
  EXPECT_EQ(calls, 6);
}

TEST(TrendCheck, Examples) {
  const RampSchedule s{0.0, 2.0, 10.0, kSteps, 0};
  std::mt19937_64 g(15);
  const auto ideal_e = random_values(g);
  const auto ideal = make_line(0, s, Variant::ideal_ed(), ideal_e);
  const auto same = trend_check(ideal, ideal, kDomain);
  EXPECT_NEAR(same.slope, 0.0, 1e-14);
  EXPECT_NEAR(same.intercept, 0.0, 1e-14);
  EXPECT_EQ(same.n_points, 11);

  std::vector<double> shifted(ideal_e);
  for (int i = 0; i <= kSteps; ++i) shifted[static_cast<std::size_t>(i)] -= 2.0 * s.l0_at(i) + 1.0;
  const auto m = make_line(0, s, Variant{VariantKind::GrecMitigated, 1, 1}, shifted);
  const auto fit = trend_check(m, ideal, kDomain);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
  EXPECT_LT(fit.residual, 1e-12);
  const auto fixed = apply_trend_correction(m, fit);
  for (int i = 0; i <= kSteps; ++i) EXPECT_NEAR(fixed.samples[static_cast<std::size_t>(i)].energy, ideal_e[static_cast<std::size_t>(i)], 1e-12);
}

TEST(TrendCheck, NeedsTwoLearningPoints) {
  const RampSchedule s{1.5, 2.0, 10.0, kSteps, 0};  // entirely in the prediction region
  const auto line = make_line(0, s, Variant::ideal_ed(), std::vector<double>(kSteps + 1, 0.0));
  EXPECT_THROW(trend_check(line, line, kDomain), InvalidArgument);
  const RampSchedule one{0.0, 2.0, 10.0, 1, 0};
  const auto l1 = make_line(0, one, Variant::ideal_ed(), {0.0, 0.0});
  EXPECT_THROW(trend_check(l1, l1, kDomain), InvalidArgument);
}

TEST(Pooled, RecoversGlobalAffineMap) {
  std::mt19937_64 g(16);
  const auto ts = build_set(0, 4, 1, g, [](auto v, int, auto&) {
    for (auto& x : v) x = 2.0 * x - 0.5;
    return v;
  });
  const auto row = fit_etas_pooled(ts);
  EXPECT_NEAR(row.eta[1], 0.5, 1e-10);
  EXPECT_NEAR(row.eta[0], 0.25, 1e-10);
  const auto t = pooled_table(row, 0, kSteps, 1);
  EXPECT_EQ(t.n_time_points(0), kSteps + 1);
  EXPECT_EQ(t.at(0, kSteps, 1), row.eta[1]);
}

}  // namespace
}  // namespace sgrec
