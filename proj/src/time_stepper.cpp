#include "m1dg/time_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "m1dg/error.hpp"
#include "m1dg/quadrature.hpp"

namespace m1dg {

double compute_dt(const Mesh& mesh, const Coefficients& coeffs, int k, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError(fmt::format("CFL safety must lie in (0, 1], got {}", safety));
  const double w1 = lobatto_first_weight(k);
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double sigma = coeffs.sigma_a[c] + coeffs.sigma_s[c];
    if (mesh.kind() == CellKind::Rectangle) {
      const auto a = mesh.jacobian(c);
      dt = std::min(dt, w1 / (1.0 / a[0] + 1.0 / a[3] + w1 * sigma));
    } else {
      const double area = mesh.cell(c).area;
      const double w = (2.0 / 3.0) * w1;
      for (const Face& f : mesh.faces(c)) dt = std::min(dt, w / (w * sigma + f.length / (2.0 * area)));
    }
  }
  dt *= safety;
  if (!(dt > 0.0 && std::isfinite(dt))) throw ConfigError("time step is not positive; degenerate mesh?");
  return dt;
}

DGField ssp_rk3_step(const DGField& u, double t, double dt, const DGOperator& op, const LimiterConfig& cfg,
                     int workers, StepReport* report, const StageObserver& observer) {
  const DGSpace& sp = u.space();
  DGField rate(sp);
  DGField stage(sp);
  StepReport local;
  auto limit = [&](DGField& f, int idx, double ts) {
    const PipelineReport pr = apply_limiters(f, cfg, op, ts, workers);
    local.theta_max = std::max(local.theta_max, pr.theta.theta_max);
    local.slope_limited += pr.slope.limited_count;
    local.fallbacks += pr.slope.fallback_count;
    if (observer) observer(f, idx, ts, pr);
  };

  op.evaluate(u, t, rate);
  linear_combination(stage, 1.0, u, dt, rate);
  limit(stage, 1, t + dt);

  DGField u2(sp);
  op.evaluate(stage, t + dt, rate);
  linear_combination(u2, 1.0, stage, dt, rate);
  linear_combination(u2, 0.75, u, 0.25, u2);
  limit(u2, 2, t + 0.5 * dt);

  op.evaluate(u2, t + 0.5 * dt, rate);
  linear_combination(stage, 1.0, u2, dt, rate);
  linear_combination(stage, 1.0 / 3.0, u, 2.0 / 3.0, stage);
  limit(stage, 3, t + dt);

  for (double v : stage.data()) {
    if (!std::isfinite(v)) throw BlowUpError(fmt::format("non-finite coefficients after step at t = {}", t));
  }
  if (report) *report = local;
  return stage;
}

double field_l2_norm(const DGField& f) {
  const DGSpace& sp = f.space();
  const int nb = sp.num_basis();
  double s = 0.0;
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    const double* b = f.cell(c);
    double cs = 0.0;
    for (int i = 0; i < 3 * nb; ++i) cs += b[i] * b[i];
    s += sp.mesh().cell(c).area * cs;
  }
  return std::sqrt(s);
}

RunResult run(const DGOperator& op, DGField u, const LimiterConfig& cfg, const RunOptions& opt) {
  if (!(opt.T >= 0.0)) throw ConfigError("final time must be non-negative");
  if (opt.samples < 1) throw ConfigError("sample count must be positive");
  cfg.validate();
  const DGSpace& sp = u.space();
  RunResult res;
  double theta0 = 0.0;
  if (opt.limit_initial && opt.T > 0.0) {
    const PipelineReport pr = apply_limiters(u, cfg, op, 0.0, opt.workers);
    theta0 = pr.theta.theta_max;
  }
  if (opt.sample_observer) opt.sample_observer(u, 0.0, realizability_stats(u, 0.0, theta0));
  res.theta_max = theta0;

  const double dt_cfl = compute_dt(sp.mesh(), op.coefficients(), sp.degree(), opt.cfl_safety);
  res.dt_min = std::numeric_limits<double>::infinity();
  double t = 0.0;
  double initial_residual = -1.0;
  DGField rate(sp);
  double theta_since_sample = theta0;

  for (int s = 1; s <= opt.samples && opt.T > 0.0; ++s) {
    const double target = (s == opt.samples) ? opt.T : opt.T * s / opt.samples;
    while (t < target) {
      double dt = std::min(dt_cfl, target - t);
      if (dt < target - t && target - (t + dt) < 1e-12 * opt.T) dt = 0.5 * (target - t);
      StepReport rep;
      DGField next = ssp_rk3_step(u, t, dt, op, cfg, opt.workers, &rep, opt.stage_observer);
      if (opt.steady) {
        // increment of the limited step; L(u) itself need not vanish where the limiter stays active
        linear_combination(rate, 1.0 / dt, next, -1.0 / dt, u);
        const double r = field_l2_norm(rate);
        if (initial_residual < 0.0) initial_residual = r;
        res.final_residual = initial_residual > 0.0 ? r / initial_residual : 0.0;
        if (initial_residual == 0.0 || res.final_residual < opt.steady_tol) res.steady_reached = true;
      }
      u = std::move(next);
      t = (dt == target - t) ? target : t + dt;
      ++res.steps;
      res.dt_min = std::min(res.dt_min, dt);
      res.dt_max = std::max(res.dt_max, dt);
      res.theta_max = std::max(res.theta_max, rep.theta_max);
      theta_since_sample = std::max(theta_since_sample, rep.theta_max);
      res.fallbacks += rep.fallbacks;
      if (res.steady_reached) break;
    }
    const RealizabilityStats st = realizability_stats(u, t, theta_since_sample);
    res.series.push_back(st);
    if (opt.sample_observer) opt.sample_observer(u, t, st);
    theta_since_sample = 0.0;
    if (res.steady_reached) break;
  }
  if (res.steps == 0) res.dt_min = 0.0;
  res.time = t;
  res.field = std::move(u);
  return res;
}

} // namespace m1dg
