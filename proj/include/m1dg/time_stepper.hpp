#pragma once

#include <functional>
#include <vector>

#include "m1dg/diagnostics.hpp"
#include "m1dg/dg_operator.hpp"
#include "m1dg/limiters.hpp"

namespace m1dg {

inline constexpr double kDefaultCflSafety = 0.9;

/// Largest step allowed by the realizability CFL condition, times safety.
double compute_dt(const Mesh& mesh, const Coefficients& coeffs, int k, double safety = kDefaultCflSafety);

/// Called after every limited stage with the stage index (1..3) and stage time.
using StageObserver = std::function<void(const DGField&, int stage, double t, const PipelineReport&)>;

struct StepReport {
  double theta_max = 0.0;
  std::size_t slope_limited = 0;
  std::size_t fallbacks = 0;
};

/// Shu-Osher SSP-RK3 with the limiter pipeline after each stage.
DGField ssp_rk3_step(const DGField& u, double t, double dt, const DGOperator& op, const LimiterConfig& cfg,
                     int workers = 1, StepReport* report = nullptr, const StageObserver& observer = {});

struct RunOptions {
  double T = 0.0;
  int samples = 20;
  double cfl_safety = kDefaultCflSafety;
  int workers = 1;
  bool steady = false;
  double steady_tol = 1e-8;
  bool limit_initial = true;
  StageObserver stage_observer;
  /// Called at t = 0 and at every sample time.
  std::function<void(const DGField&, double t, const RealizabilityStats&)> sample_observer;
};

struct RunResult {
  DGField field;
  std::vector<RealizabilityStats> series;  // one entry per sample time
  double time = 0.0;
  std::size_t steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  double theta_max = 0.0;
  std::size_t fallbacks = 0;
  bool steady_reached = false;
  double final_residual = 0.0;
};

RunResult run(const DGOperator& op, DGField initial, const LimiterConfig& cfg, const RunOptions& opt);

/// L2 norm of a DG field summed over all components, area weighted.
double field_l2_norm(const DGField& f);

} // namespace m1dg
