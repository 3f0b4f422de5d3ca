#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "m1dg/closure.hpp"
#include "m1dg/diagnostics.hpp"
#include "m1dg/fv_reference.hpp"
#include "m1dg/limiters.hpp"
#include "m1dg/mesh.hpp"
#include "m1dg/parallel.hpp"
#include "m1dg/quadrature.hpp"
#include "m1dg/scenarios.hpp"
#include "m1dg/time_stepper.hpp"

using namespace m1dg;

namespace {

int failures = 0;
const int workers = default_workers();

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

void check(const char* name, const std::function<std::string(bool&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    detail = body(ok);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(name, ok, detail + fmt(" [%.1fs]", secs));
}

std::mt19937_64 rng(20170419);
double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
Vec2 random_unit() {
  const double t = uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(t), std::sin(t)};
}
MomentVector random_state(double fmax) {
  const double psi0 = std::pow(10.0, uniform(-3.0, 1.0));
  const double f = uniform(0.0, fmax);
  const Vec2 d = random_unit();
  return {psi0, psi0 * f * d.x, psi0 * f * d.y};
}

double bisection_theta(const MomentVector& mean, const MomentVector& point) {
  auto ok = [&](double th) { return is_realizable(th * mean + (1.0 - th) * point); };
  if (ok(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double triangle_monomial_mean(Vec2 p0, Vec2 p1, Vec2 p2, int a, int b) {
  const Vec2 e1 = p1 - p0, e2 = p2 - p0;
  auto mean_st = [&](int i, int j) { return 2.0 * factorial(i) * factorial(j) / factorial(i + j + 2); };
  double sum = 0.0;
  for (int a0 = 0; a0 <= a; ++a0)
    for (int a1 = 0; a0 + a1 <= a; ++a1) {
      const int a2 = a - a0 - a1;
      const double ca = factorial(a) / (factorial(a0) * factorial(a1) * factorial(a2)) * std::pow(p0.x, a0) *
                        std::pow(e1.x, a1) * std::pow(e2.x, a2);
      for (int b0 = 0; b0 <= b; ++b0)
        for (int b1 = 0; b0 + b1 <= b; ++b1) {
          const int b2 = b - b0 - b1;
          const double cb = factorial(b) / (factorial(b0) * factorial(b1) * factorial(b2)) * std::pow(p0.y, b0) *
                            std::pow(e1.y, b1) * std::pow(e2.y, b2);
          sum += ca * cb * mean_st(a1 + b1, a2 + b2);
        }
    }
  return sum;
}

ScenarioConfig line_source_64(const std::string& limiter) {
  ScenarioConfig sc = builtin("line_source");
  sc.h = 1.0 / 64.0;
  sc.mesh = MeshKind::Rect;
  sc.k = 2;
  sc.limiter = parse_limiter_label(limiter);
  return sc;
}

// Max over cells of |m(c) - m(mirror(c))| / max |m|, for both mirror axes.
double mirror_asymmetry(const DGField& u) {
  const Mesh& mesh = u.space().mesh();
  double top = 0.0, diff = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Vec2 x = mesh.cell(c).centroid;
    const double m = u.mean(c).psi0;
    top = std::max(top, std::abs(m));
    for (Vec2 y : {Vec2{-x.x, x.y}, Vec2{x.x, -x.y}}) diff = std::max(diff, std::abs(m - u.mean(locate_cell(mesh, y)).psi0));
  }
  return diff / top;
}

struct StageWatch {
  std::size_t stages = 0, bad_means = 0, bad_nodes = 0;
  StageObserver observer() {
    return [this](const DGField& f, int, double, const PipelineReport&) {
      const RealizabilityStats st = realizability_stats(f);
      ++stages;
      bad_means += st.bad_means;
      bad_nodes += st.bad_nodes;
    };
  }
};

} // namespace

int main() {
  std::printf("workers: %d\n", workers);

  check("limiter_convergence_xi1e-4_k2", [](bool& ok) {
    LimiterStudyConfig cfg;
    const auto rows = run_limiter_study(cfg);
    const std::array<double, 4> e1{1.483e-3, 1.382e-4, 1.551e-5, 1.881e-6};
    const std::array<double, 4> order{3.6, 3.4, 3.2, 3.0};
    const std::array<double, 4> theta{5.305e-2, 1.391e-2, 3.519e-3, 8.824e-4};
    ok = rows.size() == 5;
    std::string d;
    for (std::size_t i = 0; ok && i < 4; ++i) {
      const StudyRow& r = rows[i + 1];
      ok = ok && std::abs(r.e1 - e1[i]) <= 0.10 * e1[i] && std::abs(r.order1 - order[i]) <= 0.3 &&
           std::abs(r.theta_max - theta[i]) <= 0.25 * theta[i];
      d += fmt("1/h=%g E1=%.4e p=%.2f theta=%.4e; ", r.inv_h, r.e1, r.order1, r.theta_max);
    }
    return d;
  });

  check("limiter_order_degradation_xi0", [](bool& ok) {
    LimiterStudyConfig cfg;
    cfg.xi = 0.0;
    cfg.k = 1;
    cfg.grids = {5, 10, 20, 40, 80, 160, 320};
    const auto k1 = run_limiter_study(cfg);
    cfg.k = 2;
    const auto k2 = run_limiter_study(cfg);
    bool mid = true, third = true;
    std::string d = "k=1 Einf orders";
    for (std::size_t i = 1; i < k1.size(); ++i) d += fmt(" %.2f", k1[i].orderinf);
    for (std::size_t i = 2; i + 1 < k1.size(); ++i) mid = mid && k1[i].orderinf >= 1.8;
    d += "; k=2 Einf orders";
    for (std::size_t i = 1; i < k2.size(); ++i) {
      d += fmt(" %.2f", k2[i].orderinf);
      third = third && k2[i].orderinf >= 2.8;
    }
    const double last = k1.back().orderinf;
    ok = last < 1.5 && mid && third;
    d += fmt("; finest k=1 order %.2f (needs < 1.5)", last);
    return d;
  });

  check("realizable_every_stage_line_source_rect64", [](bool& ok) {
    const ScenarioConfig sc = line_source_64("CRL22");
    const Discretization disc = discretize(sc, workers);
    StageWatch w;
    RunOptions opt;
    opt.workers = workers;
    opt.cfl_safety = 0.9;
    opt.samples = 10;
    opt.stage_observer = w.observer();
    const RunResult r = run_scenario(sc, disc, opt);
    std::size_t sampled_bad = 0;
    for (const auto& st : r.series) sampled_bad += st.bad_means + st.bad_nodes;
    ok = r.time == sc.T && w.stages == 3 * r.steps && w.bad_means == 0 && w.bad_nodes == 0 && sampled_bad == 0;
    return fmt("steps=%zu stages=%zu bad means=%zu bad nodes=%zu theta_max=%.3e", r.steps, w.stages, w.bad_means,
               w.bad_nodes, r.theta_max);
  });

  check("realizable_every_stage_homogeneous_disk_tri", [](bool& ok) {
    ScenarioConfig sc = builtin("homogeneous_disk");
    sc.mesh = MeshKind::TriFourWay;
    sc.h = 0.2;
    sc.k = 2;
    sc.limiter.slope_mode = SlopeMode::Characteristic;
    sc.limiter.realizability = true;
    const Discretization disc = discretize(sc, workers);
    StageWatch w;
    RunOptions opt;
    opt.workers = workers;
    opt.cfl_safety = 0.9;
    opt.samples = 10;
    opt.stage_observer = w.observer();
    const RunResult r = run_scenario(sc, disc, opt);
    ok = r.time == sc.T && w.stages == 3 * r.steps && w.bad_means == 0 && w.bad_nodes == 0;
    return fmt("%s steps=%zu stages=%zu bad means=%zu bad nodes=%zu theta_max=%.3e", limiter_label(sc.limiter).c_str(),
               r.steps, w.stages, w.bad_means, w.bad_nodes, r.theta_max);
  });

  DGField sl0_field;
  bool have_sl0 = false;

  check("slope_limiters_alone_lose_realizability_rect64", [&](bool& ok) {
    auto series_max = [&](const std::string& label, DGField* keep) {
      const ScenarioConfig sc = line_source_64(label);
      const Discretization disc = discretize(sc, workers);
      RunOptions opt;
      opt.workers = workers;
      opt.samples = 20;
      RunResult r = run_scenario(sc, disc, opt);
      RealizabilityStats top;
      for (const auto& st : r.series) {
        top.pct_gp = std::max(top.pct_gp, st.pct_gp);
        top.pct_cm = std::max(top.pct_cm, st.pct_cm);
      }
      *keep = std::move(r.field);
      return top;
    };
    const RealizabilityStats sl = series_max("SL0", &sl0_field);
    have_sl0 = true;
    DGField cl0_field;
    const RealizabilityStats cl = series_max("CL0", &cl0_field);
    ok = sl.pct_gp > 0.0 && sl.pct_cm > 0.0 && cl.pct_cm < sl.pct_cm;
    return fmt("SL0 max GP=%.3f%% CM=%.3f%%; CL0 max GP=%.3f%% CM=%.3f%%", sl.pct_gp, sl.pct_cm, cl.pct_gp, cl.pct_cm);
  });

  check("mirror_symmetry_line_source_rect64", [&](bool& ok) {
    const ScenarioConfig sc = line_source_64("CRL0");
    const Discretization disc = discretize(sc, workers);
    RunOptions opt;
    opt.workers = workers;
    opt.samples = 1;
    const double a_crl = mirror_asymmetry(run_scenario(sc, disc, opt).field);
    if (!have_sl0) {
      const ScenarioConfig s2 = line_source_64("SL0");
      const Discretization d2 = discretize(s2, workers);
      sl0_field = run_scenario(s2, d2, opt).field;
    }
    const double a_sl = mirror_asymmetry(sl0_field);
    ok = a_crl <= 1e-6 && a_sl >= 10.0 * a_crl;
    return fmt("CRL0 asymmetry=%.3e SL0 asymmetry=%.3e ratio=%.3g", a_crl, a_sl, a_sl / std::max(a_crl, 1e-300));
  });

  check("eddington_and_trace", [](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const MomentVector u = random_state(1.0);
      worst = std::max(worst, std::abs(closure_pressure(u).trace() - u.psi0) / u.psi0);
    }
    ok = eddington_chi(0.0) == 1.0 / 3.0 && eddington_chi(1.0) == 1.0 && worst <= 1e-12;
    return fmt("chi(0)=%.17g chi(1)=%.17g max trace rel err=%.2e", eddington_chi(0.0), eddington_chi(1.0), worst);
  });

  check("eigenstructure", [](bool& ok) {
    const EigenDecomposition iso = eigendecomposition({1.0, 0.0, 0.0}, {1.0, 0.0});
    const double s = 1.0 / std::sqrt(3.0);
    const double iso_err = std::max({std::abs(iso.eigenvalues[0] + s), std::abs(iso.eigenvalues[1]),
                                     std::abs(iso.eigenvalues[2] - s)});
    const double f = 1.0 - 1e-6;
    const EigenDecomposition beam = eigendecomposition({1.0, f, 0.0}, {1.0, 0.0});
    const double spread = beam.eigenvalues[2] - beam.eigenvalues[0];
    double lmax = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const MomentVector u = random_state(0.999);
      const EigenDecomposition e = eigendecomposition(u, random_unit());
      for (double l : e.eigenvalues) lmax = std::max(lmax, std::abs(l));
    }
    ok = iso_err <= 1e-8 && spread < 0.05 && lmax <= 1.0 + 1e-10;
    return fmt("isotropic err=%.2e spread at f=1-1e-6: %.3e max|lambda|=%.15f", iso_err, spread, lmax);
  });

  check("theta_matches_bisection", [](bool& ok) {
    double worst = 0.0;
    int tangent = 0;
    for (int i = 0; i < 10000; ++i) {
      const MomentVector mean = random_state(0.99);
      MomentVector point;
      switch (i % 4) {
      case 0: point = random_state(1.0); break;
      case 1: {
        const Vec2 d = random_unit();
        const double p0 = mean.psi0 * uniform(0.1, 3.0);
        point = {p0, p0 * d.x, p0 * d.y};
        break;
      }
      case 2: {
        // segment grazing the cone: point on the boundary reached along a tangent direction
        const Vec2 d = random_unit();
        const double p0 = mean.psi0 * uniform(0.5, 2.0);
        const MomentVector b{p0, p0 * d.x, p0 * d.y};
        point = b + uniform(0.0, 1.0) * (b - mean);
        ++tangent;
        break;
      }
      default: {
        const double p0 = uniform(-1.0, 2.0) * mean.psi0;
        const Vec2 d = random_unit();
        point = {p0, mean.psi0 * uniform(0.0, 3.0) * d.x, mean.psi0 * uniform(0.0, 3.0) * d.y};
      }
      }
      worst = std::max(worst, std::abs(realizability_theta(mean, point) - bisection_theta(mean, point)));
    }
    ok = worst <= 1e-12;
    return fmt("max |theta - bisection|=%.2e over 10000 pairs (%d boundary/tangent)", worst, tangent);
  });

  check("triangle_mean_decomposition_cubic_exact", [](bool& ok) {
    const CellMeanDecomposition d = triangle_cellmean_decomposition(2);
    double worst = 0.0, worst_quad = 0.0;
    int tri = 0;
    while (tri < 100) {
      const Vec2 p0{uniform(-1, 1), uniform(-1, 1)}, p1{uniform(-1, 1), uniform(-1, 1)}, p2{uniform(-1, 1), uniform(-1, 1)};
      if (std::abs(cross(p1 - p0, p2 - p0)) < 1e-2) continue;
      ++tri;
      for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) {
          double s = 0.0;
          for (const MeanNode& n : d.nodes) {
            const Vec2 x = p0 + n.point.x * (p1 - p0) + n.point.y * (p2 - p0);
            s += n.weight * std::pow(x.x, a) * std::pow(x.y, b);
          }
          const double exact = triangle_monomial_mean(p0, p1, p2, a, b);
          const double err = std::abs(s - exact) / std::max(1.0, std::abs(exact));
          worst = std::max(worst, err);
          if (a + b <= 2) worst_quad = std::max(worst_quad, err);
        }
    }
    ok = worst <= 1e-12;
    return fmt("max rel err degree<=3: %.3e (degree<=2: %.3e)", worst, worst_quad);
  });

  check("mean_decomposition_weights_sum_to_one", [](bool& ok) {
    double worst = 0.0;
    for (int k = 0; k <= 2; ++k) {
      worst = std::max(worst, std::abs(triangle_cellmean_decomposition(k).weight_total() - 1.0));
      worst = std::max(worst, std::abs(rectangle_cellmean_decomposition(k, 0.3, 0.7).weight_total() - 1.0));
    }
    ok = worst <= 1e-14;
    return fmt("max |sum - 1|=%.2e", worst);
  });

  check("flux_split_states_realizable", [](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const MomentVector u = random_state(1.0);
      const Vec2 nu = random_unit();
      const State3 f = normal_flux(u, nu);
      for (double sgn : {1.0, -1.0}) {
        const MomentVector v{u.psi0 + sgn * f[0], u.psi1x + sgn * f[1], u.psi1y + sgn * f[2]};
        worst = std::max(worst, -(v.psi0 - std::hypot(v.psi1x, v.psi1y)) / u.psi0);
      }
    }
    ok = worst <= 1e-12;
    return fmt("min (psi0-|psi1|)/psi0 over 10000 (U, nu): %.2e", -worst);
  });

  check("rk3_source_decay_amplification", [](bool& ok) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 0.25);
    const DGSpace space(mesh, 2);
    Coefficients c = Coefficients::zeros(mesh.num_cells());
    std::fill(c.sigma_a.begin(), c.sigma_a.end(), 3.0);
    GhostPolicy g;
    g.set_all(BoundaryCondition::reflective());
    const DGOperator op(space, g, c);
    DGField u = project_initial(space, [](double, double) { return MomentVector{2.0, 0.0, 0.0}; });
    const double dt = compute_dt(mesh, c, 2), z = -3.0 * dt;
    const double amp = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
    double worst = 0.0;
    for (int step = 0; step < 40; ++step) {
      const DGField next = ssp_rk3_step(u, step * dt, dt, op, parse_limiter_label("CRLinf"));
      for (std::size_t k = 0; k < mesh.num_cells(); ++k)
        worst = std::max(worst, std::abs(next.mean(k).psi0 / u.mean(k).psi0 - amp));
      u = next;
    }
    ok = worst <= 1e-14;
    return fmt("max |ratio - amplification|=%.2e", worst);
  });

  check("fv_reference_realizable_line_source", [](bool& ok) {
    const ScenarioConfig sc = builtin("line_source");
    std::string d;
    ok = true;
    for (int n : {64, 128, 250}) {
      const FVRunResult r = run_reference(sc, n, workers);
      ok = ok && r.non_realizable == 0 && r.time == sc.T;
      d += fmt("%dx%d: steps=%zu non-realizable=%zu; ", n, n, r.steps, r.non_realizable);
    }
    return d;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
