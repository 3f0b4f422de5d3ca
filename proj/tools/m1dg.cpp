// m1dg command-line driver: run, study, reference, select-m.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "m1dg/error.hpp"
#include "m1dg/io.hpp"
#include "m1dg/parallel.hpp"
#include "m1dg/scenarios.hpp"

namespace fs = std::filesystem;
using namespace m1dg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

fs::path output_root() {
  const char* env = std::getenv("M1DG_OUTPUT_ROOT");
  return (env && *env) ? fs::path(env) : fs::path("m1dg_out");
}

fs::path resolve_output(const std::string& flag, const std::string& fallback) {
  fs::path p = flag.empty() ? output_root() / fallback : fs::path(flag);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError(fmt::format("output: cannot create '{}': {}", p.string(), ec.message()));
  return p;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, end - pos);
    try {
      std::size_t used = 0;
      if constexpr (std::is_integral_v<T>) {
        out.push_back(static_cast<T>(std::stol(tok, &used)));
      } else {
        out.push_back(static_cast<T>(std::stod(tok, &used)));
      }
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: cannot parse '{}' in list '{}'", key, tok, text));
    }
    pos = end + 1;
  }
  return out;
}

struct ScenarioFlags {
  std::string scenario = "line_source";
  std::string mesh = "rect";
  int k = 2;
  std::string limiter;
  std::optional<double> h, T;
  int workers = 1;

  void add(CLI::App* app) {
    app->add_option("--scenario", scenario, "builtin scenario name");
    app->add_option("--mesh", mesh, "rect, tri (four-way split) or tri2");
    app->add_option("--k", k, "polynomial degree 0..2");
    app->add_option("--limiter", limiter, "limiter label, e.g. CRL22, SL0, CLinf");
    app->add_option("--h", h, "cell size");
    app->add_option("--T", T, "final time");
    app->add_option("--workers", workers, "worker threads (results do not depend on it)");
  }

  ScenarioConfig build() const {
    ScenarioConfig sc = builtin(scenario);
    sc.mesh = parse_mesh_kind(mesh);
    sc.k = k;
    if (k < 0 || k > 2) throw ConfigError(fmt::format("k: must be 0, 1 or 2, got {}", k));
    if (!limiter.empty()) sc.limiter = parse_limiter_label(limiter);
    if (h) {
      if (!(*h > 0.0)) throw ConfigError(fmt::format("h: must be positive, got {}", *h));
      sc.h = *h;
    }
    if (T) {
      if (!(*T >= 0.0)) throw ConfigError(fmt::format("T: must be non-negative, got {}", *T));
      sc.T = *T;
    }
    if (workers < 1) throw ConfigError(fmt::format("workers: must be positive, got {}", workers));
    return sc;
  }
};

double total_mass(const DGField& u) {
  double m = 0.0;
  for (std::size_t c = 0; c < u.space().num_cells(); ++c) m += u.space().mesh().cell(c).area * u.mean(c).psi0;
  return m;
}

int cmd_run(const ScenarioFlags& flags, int samples, double cfl, const std::string& sampling_name, bool vtk,
            std::uint64_t seed, const std::string& out_flag) {
  const ScenarioConfig sc = flags.build();
  if (samples < 1) throw ConfigError(fmt::format("samples: must be positive, got {}", samples));
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError(fmt::format("cfl: must lie in (0, 1], got {}", cfl));
  const Sampling sampling = parse_sampling(sampling_name);
  const fs::path out = resolve_output(out_flag, fmt::format("{}_{}_k{}_{}", sc.name, mesh_kind_name(sc.mesh), sc.k,
                                                             limiter_label(sc.limiter)));
  const auto t0 = std::chrono::steady_clock::now();

  const Discretization d = discretize(sc, flags.workers);
  RunOptions opt;
  opt.samples = samples;
  opt.cfl_safety = cfl;
  opt.workers = flags.workers;
  int index = 0;
  std::vector<RealizabilityStats> series;
  opt.sample_observer = [&](const DGField& u, double, const RealizabilityStats& st) {
    series.push_back(st);
    write_field_csv(out / fmt::format("field_{:03d}.csv", index), u, sampling);
    if (vtk) write_vtk(out / fmt::format("field_{:03d}.vtk", index), u);
    ++index;
  };
  RunResult r;
  try {
    r = run_scenario(sc, d, opt);
  } catch (...) {
    std::cerr << fmt::format("run aborted; partial artifacts in {}\n", out.string());
    throw;
  }

  write_stats_csv(out / "stats.csv", series);

  double min_mean = std::numeric_limits<double>::infinity();
  double max_f = 0.0;
  for (std::size_t c = 0; c < r.field.space().num_cells(); ++c) {
    const MomentVector m = r.field.mean(c);
    min_mean = std::min(min_mean, m.psi0);
    max_f = std::max(max_f, std::hypot(m.psi1x, m.psi1y) / m.psi0);
  }
  const RealizabilityStats last = r.series.empty() ? realizability_stats(r.field, r.time) : r.series.back();
  double max_gp = 0.0, max_cm = 0.0;
  for (const auto& s : series) {
    max_gp = std::max(max_gp, s.pct_gp);
    max_cm = std::max(max_cm, s.pct_cm);
  }
  nlohmann::ordered_json j;
  j["scenario"] = sc.name;
  j["mesh"] = mesh_kind_name(sc.mesh);
  j["k"] = sc.k;
  j["limiter"] = limiter_label(sc.limiter);
  j["h"] = sc.h;
  j["T"] = sc.T;
  j["seed"] = seed;
  j["cells"] = d.mesh->num_cells();
  j["dofs"] = d.space->num_dofs();
  j["steps"] = r.steps;
  j["time"] = r.time;
  j["dt_min"] = r.dt_min;
  j["dt_max"] = r.dt_max;
  j["theta_max"] = r.theta_max;
  j["slope_fallbacks"] = r.fallbacks;
  j["steady"] = sc.steady;
  j["steady_reached"] = r.steady_reached;
  j["final_residual"] = r.final_residual;
  j["final"] = {{"l2_norm", field_l2_norm(r.field)},
                {"mass", total_mass(r.field)},
                {"min_mean_psi0", min_mean},
                {"max_mean_f", max_f},
                {"pct_gp", last.pct_gp},
                {"pct_cm", last.pct_cm}};
  j["max_pct_gp"] = max_gp;
  j["max_pct_cm"] = max_cm;
  std::ofstream(out / "summary.json") << j.dump(2) << '\n';

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << fmt::format("{}: {} steps to t = {:.6g}, theta_max = {:.3e}, max GP {:.4g}%, max CM {:.4g}%, "
                           "wall {:.2f} s -> {}\n",
                           sc.name, r.steps, r.time, r.theta_max, max_gp, max_cm, wall, out.string());
  return kExitOk;
}

int cmd_study(double xi, const std::string& ks, const std::string& grids, const std::string& mesh,
              const std::string& out_flag) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError(fmt::format("xi: must lie in [0, 1], got {}", xi));
  const auto klist = parse_list<int>("k", ks);
  LimiterStudyConfig cfg;
  cfg.xi = xi;
  cfg.grids = parse_list<int>("grids", grids);
  cfg.mesh = parse_mesh_kind(mesh);
  const fs::path out = resolve_output(out_flag, "study");
  for (int k : klist) {
    if (k < 0 || k > 2) throw ConfigError(fmt::format("k: must be 0, 1 or 2, got {}", k));
    cfg.k = k;
    const auto rows = run_limiter_study(cfg);
    const fs::path file = out / fmt::format("study_xi{}_k{}_{}.csv", xi, k, mesh_kind_name(cfg.mesh));
    write_study_csv(file, rows);
    std::cout << fmt::format("k = {}  ->  {}\n", k, file.string());
    for (const auto& r : rows) {
      std::cout << fmt::format("{:6g}  E1 {:.3e} ({:>4.1f})  Einf {:.3e} ({:>4.1f})  theta {:.3e}\n", r.inv_h, r.e1,
                               r.order1, r.einf, r.orderinf, r.theta_max);
    }
  }
  return kExitOk;
}

int cmd_reference(const ScenarioFlags& flags, int resolution, const std::string& out_flag) {
  const ScenarioConfig sc = flags.build();
  if (resolution < 1) throw ConfigError(fmt::format("resolution: must be positive, got {}", resolution));
  const fs::path out = resolve_output(out_flag, fmt::format("reference_{}_{}", sc.name, resolution));
  const FVRunResult r = run_reference(sc, resolution, flags.workers);
  write_field_csv(out / "reference.csv", r.grid);
  std::cerr << fmt::format("{}: FV {}x{}, {} steps, {} non-realizable states -> {}\n", sc.name, r.grid.nx, r.grid.ny,
                           r.steps, r.non_realizable, out.string());
  return kExitOk;
}

int cmd_select_m(const ScenarioFlags& flags, int resolution, const std::string& out_flag) {
  const ScenarioConfig sc = flags.build();
  if (resolution < 1) throw ConfigError(fmt::format("resolution: must be positive, got {}", resolution));
  const fs::path out = resolve_output(out_flag, fmt::format("select_m_{}", sc.name));
  const FVRunResult ref = run_reference(sc, resolution, flags.workers);
  const MSelection sel = select_M(sc, ref.grid, flags.workers);
  std::ofstream os(out / "select_m.csv");
  os << "M,error\n";
  for (const auto& [M, e] : sel.errors) os << format_double(M) << ',' << format_double(e) << '\n';
  std::cout << fmt::format("best M = {}\n", sel.best_M);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Realizability-preserving DG solver for the 2D M1 model"};
  app.set_config("--config", "", "INI file; [run], [study], [reference] and [select-m] sections hold flag values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  ScenarioFlags run_flags, ref_flags, sel_flags;
  int samples = 20;
  double cfl = kDefaultCflSafety;
  std::string sampling = "means";
  bool vtk = true;
  std::uint64_t seed = 0;
  std::string run_out, study_out, ref_out, sel_out;
  auto* run = app.add_subcommand("run", "run a scenario");
  run->set_help_flag("--help");
  run_flags.add(run);
  run->add_option("--samples", samples, "number of output times");
  run->add_option("--cfl", cfl, "safety factor on the realizability time step");
  run->add_option("--sampling", sampling, "field CSV sampling: means or nodes");
  run->add_option("--vtk", vtk, "write VTK files alongside the CSVs");
  run->add_option("--seed", seed, "recorded in the summary");
  run->add_option("--output", run_out, "output directory");

  double xi = 1e-4;
  std::string ks = "2", grids = "5,10,20,40,80", study_mesh = "rect";
  auto* study = app.add_subcommand("study", "limiter convergence study");
  study->set_help_flag("--help");
  study->add_option("--xi", xi, "distance parameter of the test curve");
  study->add_option("--k", ks, "comma separated degrees");
  study->add_option("--grids", grids, "comma separated 1/h values, ascending");
  study->add_option("--mesh", study_mesh, "rect, tri or tri2");
  study->add_option("--output", study_out, "output directory");

  int ref_res = 256, sel_res = 256;
  auto* reference = app.add_subcommand("reference", "first-order finite-volume reference solution");
  reference->set_help_flag("--help");
  ref_flags.add(reference);
  reference->add_option("--resolution", ref_res, "cells along x");
  reference->add_option("--output", ref_out, "output directory");

  auto* selm = app.add_subcommand("select-m", "pick the TVB constant closest to a reference");
  selm->set_help_flag("--help");
  sel_flags.add(selm);
  selm->add_option("--resolution", sel_res, "reference cells along x");
  selm->add_option("--output", sel_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags, samples, cfl, sampling, vtk, seed, run_out);
    if (*study) return cmd_study(xi, ks, grids, study_mesh, study_out);
    if (*reference) return cmd_reference(ref_flags, ref_res, ref_out);
    if (*selm) return cmd_select_m(sel_flags, sel_res, sel_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
