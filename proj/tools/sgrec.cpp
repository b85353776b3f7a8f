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


// Command-line driver: spectrum, evolve, grec, zne, report and all.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sgrec/sgrec.hpp"

namespace {

using sgrec::RunConfig;
using sgrec::Settings;

struct Flags {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> mg;
  std::optional<std::string> preset;
  std::optional<int> n_train;
  std::optional<int> n_evol_zne;
  std::optional<double> noise_p;
  bool exact = false;
  std::optional<std::int64_t> shots;
  std::optional<int> workers;
  std::optional<std::string> run_id;
  bool quiet = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value parameter file")->check(CLI::ExistingFile);
  app->add_option("--out-dir", f.out_dir, "output root (artifacts go to <out-dir>/<run-id>)");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--mg", f.mg, "built-in mass preset m/g")->check(CLI::IsMember({0, 10}));
  app->add_option("--preset", f.preset, "built-in preset")->check(CLI::IsMember({"mg0", "mg10", "n4"}));
  app->add_option("--n-train", f.n_train, "largest number of training lines in the sweep");
  app->add_option("--n-evol-zne", f.n_evol_zne, "largest n_evol in the ZNE sweep");
  app->add_option("--noise-p", f.noise_p, "Z-flip probability per RZ gate");
  auto* exact = app->add_flag("--exact", f.exact, "exact expectation values (default)");
  auto* shots = app->add_option("--shots", f.shots, "shot-noise measurement with this many shots");
  exact->excludes(shots);
  app->add_option("--workers", f.workers, "worker threads (0: all cores)");
  app->add_option("--run-id", f.run_id, "run directory name (default: preset name)");
  app->add_flag("-q,--quiet", f.quiet, "suppress progress output");
}

RunConfig resolve(const Flags& f) {
  Settings s;
  if (!f.config.empty()) {
    try {
      s = sgrec::read_settings_file(f.config);
    } catch (const sgrec::IoError& e) {
      throw sgrec::ConfigError("config", e.what());
    }
  }
  if (f.preset) s["preset"] = *f.preset;
  if (f.mg) {
    s["preset"] = *f.mg == 10 ? "mg10" : "mg0";
    s["mg"] = std::to_string(*f.mg);
  }
  if (f.out_dir) s["out_dir"] = *f.out_dir;
  if (f.seed) s["seed"] = std::to_string(*f.seed);
  if (f.n_train) s["n_train"] = std::to_string(*f.n_train);
  if (f.n_evol_zne) s["n_evol_zne"] = std::to_string(*f.n_evol_zne);
  if (f.noise_p) s["noise_p"] = sgrec::format_real(*f.noise_p);
  if (f.exact) s["shots"] = "exact";
  if (f.shots) s["shots"] = std::to_string(*f.shots);
  if (f.workers) s["workers"] = std::to_string(*f.workers);
  if (f.run_id) s["run_id"] = *f.run_id;
  return sgrec::resolve_config(s);
}

std::string in_run(const RunConfig& cfg, const char* name) {
  return (std::filesystem::path(sgrec::run_directory(cfg)) / name).string();
}

sgrec::LineStore simulate_logged(const RunConfig& cfg, bool quiet) {
  const auto total = sgrec::plan_jobs(cfg).size();
  std::size_t done = 0;
  const sgrec::ProgressFn progress = [&](const sgrec::SimulationJob& j) {
    ++done;
    if (!quiet) {
      std::fprintf(stderr, "[%zu/%zu] %s alpha=%d tau=%d r=%d f=%d\n", done, total, j.variant.name(), j.alpha,
                   j.schedule.tau, j.variant.realization, j.variant.fold);
    }
  };
  return sgrec::simulate(cfg, true, progress);
}

/// Lines from an earlier `evolve` in the run directory, else a fresh simulation.
sgrec::LineStore load_or_simulate(const RunConfig& cfg, bool quiet) {
  const std::string path = in_run(cfg, "energy_lines.csv");
  if (std::filesystem::exists(path)) {
    if (!quiet) std::fprintf(stderr, "reading %s\n", path.c_str());
    sgrec::LineStore store;
    for (auto& l : sgrec::read_energy_lines(path).lines) {
      if (l.variant.kind != sgrec::VariantKind::GrecMitigated && l.variant.kind != sgrec::VariantKind::ZneMitigated) {
        store.add(std::move(l));
      }
    }
    return store;
  }
  auto store = simulate_logged(cfg, quiet);
  sgrec::write_energy_lines(path, cfg.effective_run_id(), store.lines());
  return store;
}

void print_config(const RunConfig& cfg) {
  std::printf("preset %s: N=%d V=%g m/g=%g lambda=%g  L=[%.6f, %.6f]  P=(%.6f, %.6f]  T=%g n_steps=%d p=%g seed=%llu\n",
              cfg.preset.c_str(), cfg.model.n_sites, cfg.model.volume, cfg.model.mass_ratio, cfg.model.lagrange,
              cfg.domain.l0_min, cfg.domain.l0_int, cfg.domain.l0_int, cfg.domain.l0_max,
              cfg.evolution.total_time, cfg.evolution.n_steps, cfg.evolution.noise_p,
              static_cast<unsigned long long>(cfg.evolution.seed));
}

sgrec::SpectrumFeatures features_for(const RunConfig& cfg) {
  const auto main = sgrec::main_schedule(cfg.domain, cfg.evolution.total_time, cfg.evolution.n_steps);
  return sgrec::spectrum_features(cfg.model, main.l0_grid(), cfg.effective_workers());
}

void print_features(const sgrec::SpectrumFeatures& f) {
  if (f.crossing_l0) {
    std::printf("tracked levels cross at l0 = %.7f (%d crossing(s))\n", *f.crossing_l0, f.n_crossings);
  } else {
    std::printf("tracked levels do not cross\n");
  }
  std::printf("minimal gap %.6e at l0 = %.7f\n", f.min_gap.gap, f.min_gap.l0);
}

int cmd_spectrum(const RunConfig& cfg) {
  print_config(cfg);
  const auto main = sgrec::main_schedule(cfg.domain, cfg.evolution.total_time, cfg.evolution.n_steps);
  const auto tracked = sgrec::ideal_lines(cfg.model, cfg.domain, main.l0_grid(), cfg.effective_workers());
  std::vector<sgrec::EnergyLine> lines;
  for (int a : cfg.evolution.levels) {
    sgrec::EnergyLine l{a, main, sgrec::Variant::ideal_ed(), {}};
    for (int i = 0; i <= main.n_steps; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      l.samples.push_back({i, main.time_at(i), tracked.grid[ii], tracked.lines[static_cast<std::size_t>(a)][ii]});
    }
    lines.push_back(std::move(l));
  }
  const auto f = features_for(cfg);
  const std::string dir = sgrec::run_directory(cfg);
  sgrec::write_ideal_lines(sgrec::plot_path(dir, "ideal_lines.csv"), lines);
  sgrec::write_spectrum_features(sgrec::plot_path(dir, "spectrum_features.csv"), cfg.domain, f);
  print_features(f);
  return 0;
}

int cmd_evolve(const RunConfig& cfg, bool quiet) {
  print_config(cfg);
  const auto store = simulate_logged(cfg, quiet);
  const std::string path = in_run(cfg, "energy_lines.csv");
  sgrec::write_energy_lines(path, cfg.effective_run_id(), store.lines());
  std::printf("wrote %zu lines to %s\n", store.lines().size(), path.c_str());
  return 0;
}

int cmd_grec(const RunConfig& cfg, bool quiet) {
  print_config(cfg);
  const auto store = load_or_simulate(cfg, quiet);
  const auto sweep = sgrec::grec_sweep(cfg, store);
  const auto best = sgrec::argmin_prediction(sweep);
  const std::string dir = sgrec::run_directory(cfg);
  sgrec::write_etas(in_run(cfg, "etas.csv"), sweep[best].etas);
  sgrec::write_grec_sweep(dir, sweep);
  std::printf("%8s %7s %14s %14s\n", "n_train", "n_evol", "E(P)", "E(LuP)");
  for (const auto& p : sweep) {
    std::printf("%8d %7d %14.6e %14.6e\n", p.n_train, p.n_evol, p.error_prediction, p.error_all);
  }
  std::printf("best: n_evol = %d, E(P) = %.6e\n", sweep[best].n_evol, sweep[best].error_prediction);
  return 0;
}

int cmd_zne(const RunConfig& cfg, bool quiet) {
  print_config(cfg);
  const auto store = load_or_simulate(cfg, quiet);
  std::vector<sgrec::EnergyLine> ideal;
  for (int a : cfg.evolution.levels) ideal.push_back(store.get(sgrec::VariantKind::IdealEd, a, 0));
  const auto sweep = sgrec::zne_sweep(cfg, store, ideal);
  const auto best = sgrec::argmin_prediction(sweep);
  sgrec::write_zne_sweep(sgrec::run_directory(cfg), sweep);
  std::printf("%7s %14s %14s\n", "n_evol", "E(P)", "E(LuP)");
  for (const auto& p : sweep) std::printf("%7d %14.6e %14.6e\n", p.n_evol, p.error_prediction, p.error_all);
  std::printf("best: n_evol = %d, E(P) = %.6e\n", sweep[best].n_evol, sweep[best].error_prediction);
  return 0;
}

void print_report(const RunConfig& cfg, const sgrec::Analysis& an) {
  std::printf("E_noisy(P) = %.6f   E_noisy(LuP) = %.6f   ideal_circuit(P) = %.3e\n", an.noisy_prediction,
              an.noisy_all, an.trotter_prediction);
  std::printf("E_ZNE_min(P)  = %.6e (n_evol = %d)\n", an.best_zne().error_prediction, an.best_zne().n_evol);
  std::printf("E_GREC_min(P) = %.6e (n_evol = %d)\n", an.best_grec().error_prediction, an.best_grec().n_evol);
  std::printf("beyond l0_star: ZNE %.6e  GREC %.6e\n", an.zne_post_star, an.grec_post_star);
  std::printf("improvement (E_GREC - E_ZNE)/E_noisy = %.2f%%\n", 100.0 * an.improvement_value());
  for (std::size_t k = 0; k < an.trends.size(); ++k) {
    std::printf("trend alpha=%d: slope %.3e intercept %.3e\n", an.levels[k], an.trends[k].slope,
                an.trends[k].intercept);
  }
  std::printf("per slice: original CX=%lld RZ=%lld SX=%lld; added noise CX=%lld RZ=%lld SX=%lld\n",
              static_cast<long long>(an.per_slice_orig[sgrec::GateKind::CX]),
              static_cast<long long>(an.per_slice_orig[sgrec::GateKind::RZ]),
              static_cast<long long>(an.per_slice_orig[sgrec::GateKind::SX]),
              static_cast<long long>(an.per_slice_grec[sgrec::GateKind::CX]),
              static_cast<long long>(an.per_slice_grec[sgrec::GateKind::RZ]),
              static_cast<long long>(an.per_slice_grec[sgrec::GateKind::SX]));
  std::printf("artifacts in %s\n", sgrec::run_directory(cfg).c_str());
}

int cmd_report(const RunConfig& cfg, bool quiet, bool fresh) {
  print_config(cfg);
  const auto store = fresh ? simulate_logged(cfg, quiet) : load_or_simulate(cfg, quiet);
  const auto an = sgrec::analyze(cfg, store);
  const auto f = features_for(cfg);
  sgrec::export_run(cfg, store, an, f);
  print_features(f);
  print_report(cfg, an);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic GREC and ZNE error mitigation for the lattice Schwinger model"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"spectrum", "exact lines, crossing and minimal gap"},
           {"evolve", "simulate every energy line"},
           {"grec", "fit, mitigate and sweep training lines"},
           {"zne", "extrapolate and sweep noise factors"},
           {"report", "errors, budgets and all exports"},
           {"all", "full pipeline from scratch"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = resolve(flags);
    for (const auto& w : cfg.model.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (chosen == "spectrum") return cmd_spectrum(cfg);
    if (chosen == "evolve") return cmd_evolve(cfg, flags.quiet);
    if (chosen == "grec") return cmd_grec(cfg, flags.quiet);
    if (chosen == "zne") return cmd_zne(cfg, flags.quiet);
    if (chosen == "report") return cmd_report(cfg, flags.quiet, false);
    return cmd_report(cfg, flags.quiet, true);
  } catch (const sgrec::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
