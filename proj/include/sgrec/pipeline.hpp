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
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgrec/adiabatic.hpp"
#include "sgrec/circuit.hpp"
#include "sgrec/config.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/grec.hpp"
#include "sgrec/metrics.hpp"
#include "sgrec/parallel.hpp"
#include "sgrec/report.hpp"
#include "sgrec/schwinger.hpp"
#include "sgrec/spectrum.hpp"
#include "sgrec/zne.hpp"

namespace sgrec {

// --- line storage ----------------------------------------------------------------

/// All lines of a run, looked up by (kind, level, ramp, realization, factor).
class LineStore {
 public:
  LineStore() = default;
  explicit LineStore(std::vector<EnergyLine> lines) : lines_(std::move(lines)) {}

  const std::vector<EnergyLine>& lines() const noexcept { return lines_; }
  void add(EnergyLine l) { lines_.push_back(std::move(l)); }
  bool empty() const noexcept { return lines_.empty(); }

  const EnergyLine* find(VariantKind kind, int alpha, int tau, int r = 0, int f = 1) const {
    for (const auto& l : lines_) {
      if (l.variant.kind == kind && l.alpha == alpha && l.schedule.tau == tau && l.variant.realization == r &&
          l.variant.fold == f) {
        return &l;
      }
    }
    return nullptr;
  }

  const EnergyLine& get(VariantKind kind, int alpha, int tau, int r = 0, int f = 1) const {
    if (const auto* l = find(kind, alpha, tau, r, f)) return *l;
    throw InvalidArgument(std::string("missing ") + kVariantNames[static_cast<std::size_t>(kind)] +
                          " line (alpha " + std::to_string(alpha) + ", tau " + std::to_string(tau) + ", r " +
                          std::to_string(r) + ", f " + std::to_string(f) + ")");
  }

  /// Largest training ramp index present for level alpha.
  int max_training_tau(int alpha) const {
    int t = 0;
    for (const auto& l : lines_)
      if (l.alpha == alpha && l.variant.kind == VariantKind::IdealEd) t = std::max(t, l.schedule.tau);
    return t;
  }

 private:
  std::vector<EnergyLine> lines_;
};

// --- simulation ------------------------------------------------------------------

/// One unit of simulation work. ideal_ed jobs produce every configured level
/// of their ramp at once.
struct SimulationJob {
  Variant variant;
  int alpha = 0;
  RampSchedule schedule;
  double cost = 0.0;  // relative runtime estimate used for ordering
};

inline std::vector<RampSchedule> run_schedules(const RunConfig& cfg) {
  std::vector<RampSchedule> s{main_schedule(cfg.domain, cfg.evolution.total_time, cfg.evolution.n_steps)};
  for (const auto& t : training_schedules(cfg.domain, cfg.evolution.total_time, cfg.evolution.n_steps,
                                          cfg.n_train_max)) {
    s.push_back(t);
  }
  return s;
}

/// Jobs in output order.
inline std::vector<SimulationJob> plan_jobs(const RunConfig& cfg, bool circuits = true) {
  const auto schedules = run_schedules(cfg);
  const RampSchedule& main = schedules.front();
  std::vector<SimulationJob> jobs;
  for (const auto& s : schedules) jobs.push_back({Variant::ideal_ed(), cfg.evolution.levels.front(), s, 0.2});
  if (!circuits) return jobs;
  for (int a : cfg.evolution.levels) {
    jobs.push_back({Variant::ideal_circuit(), a, main, 1.0});
    jobs.push_back({Variant::noisy_orig(), a, main, 1.0});
    for (int f = 3; f <= cfg.max_fold(); f += 2) jobs.push_back({Variant::zne(f), a, main, double(f)});
    for (int r = 1; r <= cfg.realizations; ++r) {
      for (const auto& s : schedules) jobs.push_back({Variant::added_noise(r), a, s, 1.9});
    }
  }
  return jobs;
}

using ProgressFn = std::function<void(const SimulationJob&)>;

/// Runs every job on a worker pool; the result order depends only on the
/// configuration.
inline LineStore simulate(const RunConfig& cfg, bool circuits = true, const ProgressFn& progress = {}) {
  cfg.validate();
  const auto jobs = plan_jobs(cfg, circuits);
  std::vector<std::vector<EnergyLine>> results(jobs.size());

  // Longest jobs first keeps the pool busy; slots keep the output order.
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return jobs[a].cost > jobs[b].cost; });

  std::mutex progress_mutex;
  parallel_for(order.size(), cfg.effective_workers(), [&](std::size_t k) {
    const std::size_t j = order[k];
    const auto& job = jobs[j];
    if (job.variant.kind == VariantKind::IdealEd) {
      const auto tracked = track_levels(cfg.model, job.schedule.l0_grid(), 2, 1);
      for (int a : cfg.evolution.levels) {
        EnergyLine line{a, job.schedule, Variant::ideal_ed(), {}};
        for (int i = 0; i <= job.schedule.n_steps; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          line.samples.push_back({i, job.schedule.time_at(i), tracked.grid[ii],
                                  tracked.lines[static_cast<std::size_t>(a)][ii]});
        }
        results[j].push_back(std::move(line));
      }
    } else {
      results[j].push_back(evolve_line(cfg.model, job.schedule, job.variant, job.alpha, cfg.evolution));
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(job);
    }
  });

  LineStore store;
  for (auto& r : results)
    for (auto& l : r) store.add(std::move(l));
  return store;
}

// --- analysis --------------------------------------------------------------------

/// Time points of the prediction region beyond l0_star.
inline std::vector<int> post_star_indices(const EnergyLine& line, const DomainSpec& d) {
  return select_indices(line, [&](double l0) {
    return d.in_prediction(l0) && l0 > d.l0_star + d.boundary_tolerance();
  });
}

struct ZneSweepPoint {
  int n_evol = 0;
  double error_prediction = 0.0;
  double error_all = 0.0;
  std::vector<EnergyLine> mitigated;  // one per level
};

struct SpectrumFeatures {
  std::optional<double> crossing_l0;
  int n_crossings = 0;
  GapMinimum min_gap;
};

/// Crossing of the tracked lines on `grid` and the minimal gap on [lo, hi].
inline SpectrumFeatures spectrum_features(const ModelParams& params, const std::vector<double>& grid,
                                          int workers = 1) {
  if (grid.size() < 2) throw InvalidArgument("spectrum grid needs at least two points");
  const auto tracked = track_levels(params, grid, 2, workers);
  SpectrumFeatures f;
  f.crossing_l0 = locate_crossing(tracked);
  f.n_crossings = count_crossings(tracked);
  f.min_gap = locate_min_gap(params, grid.front(), grid.back(), 201, 1e-10, workers);
  return f;
}

struct MetricRow {
  std::string method;
  int n_evol = 0;
  Region region = Region::Prediction;
  double error = 0.0;
  GateCounts totals;
};

struct Analysis {
  std::vector<int> levels;
  std::vector<EnergyLine> ideal;          // per level, main ramp
  std::vector<EnergyLine> ideal_circuit;  // per level
  std::vector<EnergyLine> noisy;          // per level
  double noisy_prediction = 0.0;
  double noisy_all = 0.0;
  double trotter_prediction = 0.0;  // ideal_circuit against ideal_ed in the prediction region

  std::vector<ZneSweepPoint> zne;
  std::size_t zne_best = 0;
  std::vector<GrecSweepPoint> grec;
  std::size_t grec_best = 0;

  double zne_post_star = 0.0;  // best configurations, l0 > l0_star only
  double grec_post_star = 0.0;
  std::vector<TrendFit> trends;  // best GREC, per level

  GateCounts per_slice_orig;
  GateCounts per_slice_grec;
  std::vector<MetricRow> metrics;

  const ZneSweepPoint& best_zne() const { return zne.at(zne_best); }
  const GrecSweepPoint& best_grec() const { return grec.at(grec_best); }
  double improvement_value() const {
    return improvement(best_grec().error_prediction, best_zne().error_prediction, noisy_prediction);
  }
};

/// Per-slice counts of the compiled original and added-noise slices.
inline std::pair<GateCounts, GateCounts> own_slice_counts(const RunConfig& cfg) {
  const double l0 = cfg.domain.l0_int;
  const double dt = cfg.evolution.total_time / cfg.evolution.n_steps;
  const auto orig = count_gates(compile_slice(build_hamiltonian(cfg.model, l0), dt));
  const auto grec = count_gates(compile_slice(apply_added_noise(cfg.model, l0, cfg.evolution.rotation(1)), dt));
  return {orig, grec};
}

inline std::vector<ZneSweepPoint> zne_sweep(const RunConfig& cfg, const LineStore& store,
                                            const std::vector<EnergyLine>& ideal) {
  std::vector<ZneSweepPoint> out;
  for (int n_evol = cfg.n_evol_zne_min; n_evol <= cfg.n_evol_zne_max; ++n_evol) {
    ZneSweepPoint p{n_evol, 0.0, 0.0, {}};
    for (int a : cfg.evolution.levels) {
      std::vector<EnergyLine> by_factor;
      for (int f : noise_factors(n_evol)) {
        EnergyLine l = f == 1 ? store.get(VariantKind::NoisyOrig, a, 0) : store.get(VariantKind::Zne, a, 0, 0, f);
        l.variant.fold = f;
        by_factor.push_back(std::move(l));
      }
      p.mitigated.push_back(mitigate_line_zne(by_factor, a));
    }
    p.error_prediction = region_error("zne", p.mitigated, ideal, cfg.domain, Region::Prediction).value;
    p.error_all = region_error("zne", p.mitigated, ideal, cfg.domain, Region::LearningAndPrediction).value;
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<GrecLevelData> grec_inputs(const RunConfig& cfg, const LineStore& store) {
  std::vector<GrecLevelData> out;
  for (int a : cfg.evolution.levels) {
    GrecLevelData lv;
    lv.training.alpha = a;
    for (int tau = 1; tau <= cfg.n_train_max; ++tau) {
      TrainingLine tl{store.get(VariantKind::IdealEd, a, tau), {}};
      for (int r = 1; r <= cfg.realizations; ++r) tl.noisy.push_back(store.get(VariantKind::AddedNoise, a, tau, r));
      lv.training.lines.push_back(std::move(tl));
    }
    for (int r = 1; r <= cfg.realizations; ++r) lv.main_noisy.push_back(store.get(VariantKind::AddedNoise, a, 0, r));
    lv.main_ideal = store.get(VariantKind::IdealEd, a, 0);
    out.push_back(std::move(lv));
  }
  return out;
}

inline std::vector<GrecSweepPoint> grec_sweep(const RunConfig& cfg, const LineStore& store) {
  return sweep_training_lines(grec_inputs(cfg, store), cfg.domain, cfg.n_train_min, cfg.n_train_max);
}

template <class Point>
std::size_t argmin_prediction(const std::vector<Point>& pts) {
  if (pts.empty()) throw InvalidArgument("empty sweep");
  std::size_t best = 0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].error_prediction < pts[best].error_prediction) best = k;
  return best;
}

inline Analysis analyze(const RunConfig& cfg, const LineStore& store) {
  cfg.validate();
  Analysis an;
  an.levels = cfg.evolution.levels;
  for (int a : an.levels) {
    an.ideal.push_back(store.get(VariantKind::IdealEd, a, 0));
    an.ideal_circuit.push_back(store.get(VariantKind::IdealCircuit, a, 0));
    an.noisy.push_back(store.get(VariantKind::NoisyOrig, a, 0));
  }
  const auto& d = cfg.domain;
  an.noisy_prediction = region_error("noisy", an.noisy, an.ideal, d, Region::Prediction).value;
  an.noisy_all = region_error("noisy", an.noisy, an.ideal, d, Region::LearningAndPrediction).value;
  an.trotter_prediction = region_error("ideal_circuit", an.ideal_circuit, an.ideal, d, Region::Prediction).value;

  an.zne = zne_sweep(cfg, store, an.ideal);
  an.zne_best = argmin_prediction(an.zne);
  an.grec = grec_sweep(cfg, store);
  an.grec_best = argmin_prediction(an.grec);

  const auto post = post_star_indices(an.ideal.front(), d);
  if (!post.empty()) {
    an.zne_post_star = summed_rms_error(an.best_zne().mitigated, an.ideal, post);
    an.grec_post_star = summed_rms_error(an.best_grec().mitigated, an.ideal, post);
  }
  for (std::size_t k = 0; k < an.ideal.size(); ++k) {
    an.trends.push_back(trend_check(an.best_grec().mitigated[k], an.ideal[k], d));
  }

  std::tie(an.per_slice_orig, an.per_slice_grec) = own_slice_counts(cfg);
  const int n = cfg.evolution.n_steps;
  const int n_levels = static_cast<int>(an.levels.size());
  const auto noisy_budget = gate_budget(BudgetMethod::Noisy, 1, an.per_slice_orig, n, n_levels);
  an.metrics.push_back({"noisy", 1, Region::Prediction, an.noisy_prediction, noisy_budget.totals});
  an.metrics.push_back({"noisy", 1, Region::LearningAndPrediction, an.noisy_all, noisy_budget.totals});
  for (const auto& p : an.zne) {
    const auto b = gate_budget(BudgetMethod::Zne, p.n_evol, an.per_slice_orig, n, n_levels);
    an.metrics.push_back({"zne", p.n_evol, Region::Prediction, p.error_prediction, b.totals});
    an.metrics.push_back({"zne", p.n_evol, Region::LearningAndPrediction, p.error_all, b.totals});
  }
  for (const auto& p : an.grec) {
    const auto b = gate_budget(BudgetMethod::Grec, p.n_evol, an.per_slice_grec, n, n_levels);
    an.metrics.push_back({"grec", p.n_evol, Region::Prediction, p.error_prediction, b.totals});
    an.metrics.push_back({"grec", p.n_evol, Region::LearningAndPrediction, p.error_all, b.totals});
  }
  return an;
}

// --- export ------------------------------------------------------------------------

inline const std::vector<std::string>& metrics_header() {
  static const std::vector<std::string> h{"method", "n_evol", "region", "error", "N_CX", "N_RZ", "N_SX"};
  return h;
}

inline void write_metrics(const std::string& path, const std::vector<MetricRow>& rows) {
  CsvWriter w(path, metrics_header());
  for (const auto& m : rows) {
    w.row({m.method, std::to_string(m.n_evol), region_name(m.region), format_real(m.error),
           std::to_string(m.totals[GateKind::CX]), std::to_string(m.totals[GateKind::RZ]),
           std::to_string(m.totals[GateKind::SX])});
  }
  w.close();
}

/// out_dir/run_id
inline std::string run_directory(const RunConfig& cfg) {
  return (std::filesystem::path(cfg.out_dir) / cfg.effective_run_id()).string();
}

inline std::string plot_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / "plotdata" / name).string();
}

inline void write_ideal_lines(const std::string& path, const std::vector<EnergyLine>& ideal) {
  CsvWriter w(path, {"alpha", "i", "t", "l0", "energy"});
  for (const auto& l : ideal)
    for (const auto& s : l.samples)
      w.row({std::to_string(l.alpha), std::to_string(s.i), format_real(s.t), format_real(s.l0), format_real(s.energy)});
  w.close();
}

inline void write_spectrum_features(const std::string& path, const DomainSpec& d, const SpectrumFeatures& f) {
  CsvWriter w(path, {"feature", "value"});
  w.row({"l0_min", format_real(d.l0_min)});
  w.row({"l0_int", format_real(d.l0_int)});
  w.row({"l0_star", format_real(d.l0_star)});
  w.row({"l0_max", format_real(d.l0_max)});
  w.row({"n_crossings", std::to_string(f.n_crossings)});
  w.row({"crossing_l0", f.crossing_l0 ? format_real(*f.crossing_l0) : std::string("nan")});
  w.row({"min_gap_l0", format_real(f.min_gap.l0)});
  w.row({"min_gap", format_real(f.min_gap.gap)});
  w.close();
}

inline void write_zne_sweep(const std::string& dir, const std::vector<ZneSweepPoint>& pts) {
  CsvWriter w(plot_path(dir, "zne_sweep.csv"), {"n_evol", "alpha", "i", "l0", "energy"});
  for (const auto& p : pts)
    for (const auto& l : p.mitigated)
      for (const auto& s : l.samples)
        w.row({std::to_string(p.n_evol), std::to_string(l.alpha), std::to_string(s.i), format_real(s.l0),
               format_real(s.energy)});
  w.close();
}

inline void write_grec_sweep(const std::string& dir, const std::vector<GrecSweepPoint>& pts) {
  CsvWriter w(plot_path(dir, "grec_sweep.csv"), {"n_train", "n_evol", "alpha", "i", "l0", "energy"});
  for (const auto& p : pts)
    for (const auto& l : p.mitigated)
      for (const auto& s : l.samples)
        w.row({std::to_string(p.n_train), std::to_string(p.n_evol), std::to_string(l.alpha), std::to_string(s.i),
               format_real(s.l0), format_real(s.energy)});
  w.close();
}

inline void write_sweep_errors(const std::string& dir, const std::vector<ZneSweepPoint>& zne,
                               const std::vector<GrecSweepPoint>& grec) {
  CsvWriter w(plot_path(dir, "sweep_errors.csv"), {"method", "n_evol", "error_P", "error_LuP"});
  for (const auto& p : zne)
    w.row({"zne", std::to_string(p.n_evol), format_real(p.error_prediction), format_real(p.error_all)});
  for (const auto& p : grec)
    w.row({"grec", std::to_string(p.n_evol), format_real(p.error_prediction), format_real(p.error_all)});
  w.close();
}

inline void write_table3(const std::string& path, const RunConfig& cfg, const Analysis& an) {
  CsvWriter w(path, {"preset", "mg", "E_noisy", "E_zne_min", "n_evol_zne", "E_grec_min", "n_evol_grec",
                     "improvement", "E_zne_post_star", "E_grec_post_star"});
  w.row({cfg.preset, format_real(cfg.model.mass_ratio), format_real(an.noisy_prediction),
         format_real(an.best_zne().error_prediction), std::to_string(an.best_zne().n_evol),
         format_real(an.best_grec().error_prediction), std::to_string(an.best_grec().n_evol),
         format_real(an.improvement_value()), format_real(an.zne_post_star), format_real(an.grec_post_star)});
  w.close();
}

inline void write_trends(const std::string& path, const std::vector<int>& levels, const std::vector<TrendFit>& t) {
  CsvWriter w(path, {"alpha", "slope", "intercept", "residual", "n_points"});
  for (std::size_t k = 0; k < t.size(); ++k)
    w.row({std::to_string(levels.at(k)), format_real(t[k].slope), format_real(t[k].intercept),
           format_real(t[k].residual), std::to_string(t[k].n_points)});
  w.close();
}

inline void write_gate_counts(const std::string& path, const Analysis& an, double mass_ratio) {
  CsvWriter w(path, {"circuit", "source", "CX", "ID", "RZ", "SX", "X"});
  const auto row = [&](const char* c, const char* src, const GateCounts& g) {
    w.row({c, src, std::to_string(g[GateKind::CX]), std::to_string(g[GateKind::ID]), std::to_string(g[GateKind::RZ]),
           std::to_string(g[GateKind::SX]), std::to_string(g[GateKind::X])});
  };
  row("original", "compiled", an.per_slice_orig);
  row("added_noise", "compiled", an.per_slice_grec);
  if (mass_ratio == 0.0 || mass_ratio == 10.0) {
    row("original", "reference", reference_counts_per_slice(CircuitFlavor::Original, mass_ratio));
    row("added_noise", "reference", reference_counts_per_slice(CircuitFlavor::AddedNoise, mass_ratio));
  }
  w.close();
}

/// Best mitigated lines appended to the simulated lines.
inline std::vector<EnergyLine> exported_lines(const LineStore& store, const Analysis* an) {
  std::vector<EnergyLine> out = store.lines();
  if (an != nullptr) {
    for (const auto& l : an->best_zne().mitigated) out.push_back(l);
    for (const auto& l : an->best_grec().mitigated) out.push_back(l);
  }
  return out;
}

/// Writes every artifact of a completed run under run_directory(cfg).
inline void export_run(const RunConfig& cfg, const LineStore& store, const Analysis& an,
                       const SpectrumFeatures& features) {
  const std::string dir = run_directory(cfg);
  const auto p = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  write_energy_lines(p("energy_lines.csv"), cfg.effective_run_id(), exported_lines(store, &an));
  write_etas(p("etas.csv"), an.best_grec().etas);
  write_metrics(p("metrics.csv"), an.metrics);
  write_ideal_lines(plot_path(dir, "ideal_lines.csv"), an.ideal);
  write_spectrum_features(plot_path(dir, "spectrum_features.csv"), cfg.domain, features);
  write_zne_sweep(dir, an.zne);
  write_grec_sweep(dir, an.grec);
  write_sweep_errors(dir, an.zne, an.grec);
  write_table3(plot_path(dir, "table3.csv"), cfg, an);
  write_trends(plot_path(dir, "trend.csv"), an.levels, an.trends);
  write_gate_counts(plot_path(dir, "gate_counts.csv"), an, cfg.model.mass_ratio);
}

/// Header-only versions of the three main tables.
inline void export_empty(const std::string& dir, const std::string& run_id) {
  const auto p = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  write_energy_lines(p("energy_lines.csv"), run_id, {});
  write_etas(p("etas.csv"), EtaTable(1));
  write_metrics(p("metrics.csv"), {});
}

}  // namespace sgrec
