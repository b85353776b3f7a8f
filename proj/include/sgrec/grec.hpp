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
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "sgrec/adiabatic.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/metrics.hpp"
#include "sgrec/schwinger.hpp"

namespace sgrec {

/// Coefficients for one (level, time point): eta[0] is the offset, eta[r]
/// multiplies added-noise realization r.
struct EtaRow {
  std::vector<double> eta;
  double residual = 0.0;
  int rank = 0;
};

/// Learned coefficients indexed by level, time point and realization.
class EtaTable {
 public:
  explicit EtaTable(int realizations = 1) : realizations_(realizations) {
    if (realizations < 1) throw InvalidArgument("need at least one realization");
  }

  int realizations() const noexcept { return realizations_; }

  void set(int alpha, int i, EtaRow row) {
    row.eta.resize(static_cast<std::size_t>(realizations_) + 1, 0.0);
    auto& rows = rows_[alpha];
    if (rows.size() <= static_cast<std::size_t>(i)) rows.resize(static_cast<std::size_t>(i) + 1);
    rows[static_cast<std::size_t>(i)] = std::move(row);
  }

  bool has(int alpha, int i) const {
    const auto it = rows_.find(alpha);
    return it != rows_.end() && static_cast<std::size_t>(i) < it->second.size() &&
           !it->second[static_cast<std::size_t>(i)].eta.empty();
  }

  const EtaRow& row(int alpha, int i) const {
    if (!has(alpha, i)) {
      throw InvalidArgument("no coefficients for level " + std::to_string(alpha) + ", time point " +
                            std::to_string(i));
    }
    return rows_.at(alpha)[static_cast<std::size_t>(i)];
  }

  double at(int alpha, int i, int r) const { return row(alpha, i).eta.at(static_cast<std::size_t>(r)); }

  std::vector<int> levels() const {
    std::vector<int> out;
    for (const auto& [a, _] : rows_) out.push_back(a);
    return out;
  }

  int n_time_points(int alpha) const {
    const auto it = rows_.find(alpha);
    return it == rows_.end() ? 0 : static_cast<int>(it->second.size());
  }

 private:
  int realizations_;
  std::map<int, std::vector<EtaRow>> rows_;
};

/// One training ramp: its exact line and one noisy line per realization
/// (noisy[r - 1] is realization r).
struct TrainingLine {
  EnergyLine ideal;
  std::vector<EnergyLine> noisy;
};

/// Training data of one level.
struct TrainingSet {
  int alpha = 0;
  std::vector<TrainingLine> lines;

  int realizations() const noexcept {
    std::size_t r = 0;
    for (const auto& l : lines) r = std::max(r, l.noisy.size());
    return static_cast<int>(r);
  }

  int n_steps() const { return lines.empty() ? 0 : lines.front().ideal.schedule.n_steps; }

  void validate() const {
    if (lines.empty()) throw InvalidArgument("training set is empty");
    const int r = realizations();
    if (r < 1) throw InvalidArgument("training lines carry no noisy realizations");
    if (static_cast<int>(lines.size()) < r + 1) {
      throw InvalidArgument("need at least R + 1 = " + std::to_string(r + 1) +
                            " training lines, got " + std::to_string(lines.size()));
    }
    const auto n = static_cast<std::size_t>(n_steps()) + 1;
    for (const auto& l : lines) {
      if (l.ideal.alpha != alpha || l.ideal.samples.size() != n) {
        throw InvalidArgument("training lines must share the level and the number of time points");
      }
      for (std::size_t k = 0; k < l.noisy.size(); ++k) {
        if (l.noisy[k].alpha != alpha || l.noisy[k].samples.size() != n) {
          throw InvalidArgument("noisy training lines must share the level and the number of time points");
        }
        if (l.noisy[k].variant.realization != static_cast<int>(k) + 1) {
          throw InvalidArgument("noisy training lines must be ordered by realization");
        }
      }
    }
  }
};

/// Picks which training lines enter a fit with n_train lines.
using TrainingSelector = std::function<TrainingSet(const TrainingSet&, int n_train)>;

/// Keeps the n_train lines whose ramps end nearest the prediction region.
inline TrainingSet nearest_to_prediction(const TrainingSet& all, int n_train) {
  if (n_train < 1 || n_train > static_cast<int>(all.lines.size())) {
    throw InvalidArgument("cannot select " + std::to_string(n_train) + " of " +
                          std::to_string(all.lines.size()) + " training lines");
  }
  std::vector<std::size_t> order(all.lines.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return all.lines[a].ideal.schedule.l0_end > all.lines[b].ideal.schedule.l0_end;
  });
  TrainingSet out{all.alpha, {}};
  for (int k = 0; k < n_train; ++k) out.lines.push_back(all.lines[order[static_cast<std::size_t>(k)]]);
  return out;
}

namespace detail {

inline EtaRow solve_min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd x = cod.solve(b);
  EtaRow row;
  row.eta.assign(x.data(), x.data() + x.size());
  row.residual = (a * x - b).norm();
  row.rank = static_cast<int>(cod.rank());
  return row;
}

}  // namespace detail

/// Least-squares coefficients at time point i: minimizes
/// sum_tau (sum_r eta_r noisy_{tau,r}(i) + eta_0 - ideal_tau(i))^2 and
/// returns the minimum-norm minimizer when the system is rank deficient.
inline EtaRow fit_etas(const TrainingSet& ts, int i) {
  ts.validate();
  const int r_max = ts.realizations();
  if (i < 0 || i > ts.n_steps()) throw InvalidArgument("time point out of range");
  const auto rows = static_cast<Eigen::Index>(ts.lines.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, r_max + 1);
  Eigen::VectorXd b(rows);
  for (Eigen::Index t = 0; t < rows; ++t) {
    const auto& line = ts.lines[static_cast<std::size_t>(t)];
    a(t, 0) = 1.0;
    for (std::size_t r = 0; r < line.noisy.size(); ++r) {
      a(t, static_cast<Eigen::Index>(r) + 1) = line.noisy[r].samples[static_cast<std::size_t>(i)].energy;
    }
    b(t) = line.ideal.samples[static_cast<std::size_t>(i)].energy;
  }
  return detail::solve_min_norm(a, b);
}

/// Coefficients for every time point of one level.
inline EtaTable fit_eta_table(const TrainingSet& ts) {
  ts.validate();
  EtaTable table(ts.realizations());
  for (int i = 0; i <= ts.n_steps(); ++i) table.set(ts.alpha, i, fit_etas(ts, i));
  return table;
}

/// Adds another level's coefficients into `into`.
inline void merge_eta_table(EtaTable& into, const EtaTable& from) {
  for (int a : from.levels())
    for (int i = 0; i < from.n_time_points(a); ++i)
      if (from.has(a, i)) into.set(a, i, from.row(a, i));
}

/// Applies learned coefficients to the noisy main lines (main_noisy[r - 1] is
/// realization r) time point by time point.
inline EnergyLine mitigate_line(const std::vector<EnergyLine>& main_noisy, const EtaTable& etas,
                                int alpha) {
  if (main_noisy.empty()) throw InvalidArgument("no noisy main lines to mitigate");
  if (static_cast<int>(main_noisy.size()) > etas.realizations()) {
    throw InvalidArgument("more realizations than learned coefficients");
  }
  const auto n = main_noisy.front().samples.size();
  for (const auto& l : main_noisy) {
    if (l.samples.size() != n || l.alpha != alpha) {
      throw InvalidArgument("main lines must share the level and the number of time points");
    }
  }
  EnergyLine out{alpha, main_noisy.front().schedule, {VariantKind::GrecMitigated, etas.realizations(), 1}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& eta = etas.row(alpha, static_cast<int>(i)).eta;
    double e = eta[0];
    for (std::size_t r = 0; r < main_noisy.size(); ++r) e += eta[r + 1] * main_noisy[r].samples[i].energy;
    auto s = main_noisy.front().samples[i];
    s.energy = e;
    out.samples.push_back(s);
  }
  return out;
}

/// Single coefficient row shared by all time points, fitted on every
/// (training line, time point) pair at once. This is the constant-coefficient
/// baseline; the per-time-point fit above is the default.
inline EtaRow fit_etas_pooled(const TrainingSet& ts) {
  ts.validate();
  const int r_max = ts.realizations();
  const auto n = static_cast<Eigen::Index>(ts.n_steps()) + 1;
  const auto rows = static_cast<Eigen::Index>(ts.lines.size()) * n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, r_max + 1);
  Eigen::VectorXd b(rows);
  Eigen::Index row = 0;
  for (const auto& line : ts.lines) {
    for (Eigen::Index i = 0; i < n; ++i, ++row) {
      a(row, 0) = 1.0;
      for (std::size_t r = 0; r < line.noisy.size(); ++r) {
        a(row, static_cast<Eigen::Index>(r) + 1) = line.noisy[r].samples[static_cast<std::size_t>(i)].energy;
      }
      b(row) = line.ideal.samples[static_cast<std::size_t>(i)].energy;
    }
  }
  return detail::solve_min_norm(a, b);
}

inline EtaTable pooled_table(const EtaRow& row, int alpha, int n_steps, int realizations) {
  EtaTable t(realizations);
  for (int i = 0; i <= n_steps; ++i) t.set(alpha, i, row);
  return t;
}

// --- sweep ------------------------------------------------------------------------

/// Everything needed to mitigate one level.
struct GrecLevelData {
  TrainingSet training;                // all available training lines
  std::vector<EnergyLine> main_noisy;  // realization r at index r - 1
  EnergyLine main_ideal;               // exact line on the main ramp
};

struct GrecSweepPoint {
  int n_train = 0;
  int n_evol = 0;  // n_train + 1 evolutions per realization
  double error_prediction = 0.0;
  double error_all = 0.0;
  EtaTable etas;
  std::vector<EnergyLine> mitigated;  // one per level, in input order
};

/// Mitigation error in the prediction region for every n_train in
/// [n_min, n_max]. The best configuration is chosen a posteriori from the
/// returned points.
inline std::vector<GrecSweepPoint> sweep_training_lines(const std::vector<GrecLevelData>& levels,
                                                        const DomainSpec& domain, int n_min, int n_max,
                                                        const TrainingSelector& select = nearest_to_prediction) {
  if (levels.empty()) throw InvalidArgument("no levels to mitigate");
  if (n_min < 1 || n_max < n_min) throw InvalidArgument("invalid training-line range");
  std::vector<GrecSweepPoint> out;
  for (int n_train = n_min; n_train <= n_max; ++n_train) {
    GrecSweepPoint p{n_train, n_train + 1, 0.0, 0.0, EtaTable(levels.front().training.realizations()), {}};
    std::vector<EnergyLine> ideal;
    for (const auto& lv : levels) {
      const TrainingSet ts = select(lv.training, n_train);
      const EtaTable t = fit_eta_table(ts);
      merge_eta_table(p.etas, t);
      p.mitigated.push_back(mitigate_line(lv.main_noisy, t, lv.training.alpha));
      ideal.push_back(lv.main_ideal);
    }
    p.error_prediction = region_error("grec", p.mitigated, ideal, domain, Region::Prediction).value;
    p.error_all = region_error("grec", p.mitigated, ideal, domain, Region::LearningAndPrediction).value;
    out.push_back(std::move(p));
  }
  return out;
}

// --- trend check ------------------------------------------------------------------------

struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit residual
  int n_points = 0;

  double at(double l0) const noexcept { return slope * l0 + intercept; }
};

/// Fits ideal - mitigated = slope * l0 + intercept over the learning region.
/// The correction is reported, not applied.
inline TrendFit trend_check(const EnergyLine& mitigated, const EnergyLine& ideal, const DomainSpec& d) {
  detail::check_aligned(mitigated, ideal);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < ideal.samples.size(); ++k) {
    if (!d.in_learning(ideal.samples[k].l0)) continue;
    xs.push_back(ideal.samples[k].l0);
    ys.push_back(ideal.samples[k].energy - mitigated.samples[k].energy);
  }
  if (xs.size() < 2) throw InvalidArgument("trend fit needs at least two learning-region points");
  const auto n = static_cast<double>(xs.size());
  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - xbar) * (xs[k] - xbar);
    sxy += (xs[k] - xbar) * (ys[k] - ybar);
  }
  if (sxx == 0.0) throw InvalidArgument("learning-region points share one l0 value");
  TrendFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.n_points = static_cast<int>(xs.size());
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - fit.at(xs[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

/// mitigated + (slope * l0 + intercept) at every time point.
inline EnergyLine apply_trend_correction(EnergyLine line, const TrendFit& fit) {
  for (auto& s : line.samples) s.energy += fit.at(s.l0);
  return line;
}

}  // namespace sgrec
