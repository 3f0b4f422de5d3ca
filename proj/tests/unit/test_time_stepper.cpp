#include <gtest/gtest.h>

#include <cmath>

#include "m1dg/dg_operator.hpp"
#include "m1dg/error.hpp"
#include "m1dg/mesh.hpp"
#include "m1dg/scenarios.hpp"
#include "m1dg/time_stepper.hpp"
#include "support.hpp"

using namespace m1dg;
using namespace m1dg::testing;

TEST(TimeStep, RectangleExamples) {
  const Mesh m = build_rect_mesh({0, 1, 0, 1}, 0.05);
  Coefficients c = Coefficients::zeros(m.num_cells());
  EXPECT_NEAR(compute_dt(m, c, 2, 1.0), (1.0 / 6.0) / 40.0, 1e-15);
  EXPECT_NEAR(compute_dt(m, c, 2, 1.0), 4.1667e-3, 1e-7);
  std::fill(c.sigma_a.begin(), c.sigma_a.end(), 10.0);
  EXPECT_NEAR(compute_dt(m, c, 2, 1.0), (1.0 / 6.0) / (40.0 + 10.0 / 6.0), 1e-15);
  EXPECT_NEAR(compute_dt(m, c, 2, 1.0), 4.0e-3, 1e-15);
  EXPECT_NEAR(compute_dt(m, c, 2, 0.9), 0.9 * 4.0e-3, 1e-15);
}

TEST(TimeStep, RightTriangleExample) {
  const Mesh m = import_tri_mesh("3\n0 0\n1 0\n0 1\n1\n1 2 3\n");
  const Coefficients c = Coefficients::zeros(1);
  EXPECT_NEAR(compute_dt(m, c, 2, 1.0), (2.0 / 3.0) * (1.0 / 6.0) * 2.0 * 0.5 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(compute_dt(m, c, 2, 1.0), 0.078567, 1e-6);
}

TEST(TimeStep, SafetyOutOfRange) {
  const Mesh m = build_rect_mesh({0, 1, 0, 1}, 0.5);
  const Coefficients c = Coefficients::zeros(m.num_cells());
  EXPECT_THROW(compute_dt(m, c, 1, 0.0), ConfigError);
  EXPECT_THROW(compute_dt(m, c, 1, 1.5), ConfigError);
}

namespace {

struct Square {
  Mesh mesh;
  DGSpace space;
  DGOperator op;
  Square(Coefficients c, GhostPolicy g, int k = 2)
      : mesh(build_rect_mesh({0, 1, 0, 1}, 0.25)), space(mesh, k), op(space, std::move(g), std::move(c)) {}
};

GhostPolicy reflective() {
  GhostPolicy g;
  g.set_all(BoundaryCondition::reflective());
  return g;
}

} // namespace

TEST(RK3, ConstantStateUnchanged) {
  GhostPolicy g;
  g.set_all(BoundaryCondition::dirichlet(MomentVector{1.5, 0.3, -0.2}));
  for (int k : {0, 1, 2}) {
    Square s(Coefficients::zeros(16), g, k);
    DGField u(s.space);
    for (std::size_t c = 0; c < 16; ++c) u.set_mean(c, {1.5, 0.3, -0.2});
    for (const char* label : {"CRL0", "CRLinf", "SL0"}) {
      const DGField out = ssp_rk3_step(u, 0.0, 0.01, s.op, parse_limiter_label(label));
      for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(out.data()[i], u.data()[i], 1e-14) << label;
    }
  }
}

TEST(RK3, SourceOnlyDecayAmplification) {
  Coefficients c = Coefficients::zeros(16);
  std::fill(c.sigma_a.begin(), c.sigma_a.end(), 3.0);
  Square s(c, reflective());
  DGField u = project_initial(s.space, [](double, double) { return MomentVector{2.0, 0.0, 0.0}; });
  const double dt = compute_dt(s.mesh, c, 2);
  const double z = -3.0 * dt;
  const double g = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
  LimiterConfig off = parse_limiter_label("CRLinf");
  for (int step = 0; step < 40; ++step) {
    const DGField next = ssp_rk3_step(u, step * dt, dt, s.op, off);
    for (std::size_t c2 = 0; c2 < 16; ++c2) {
      EXPECT_NEAR(next.mean(c2).psi0 / u.mean(c2).psi0, g, 1e-14);
      EXPECT_NEAR(next.mean(c2).psi1x, 0.0, 1e-14);
    }
    u = next;
  }
}

TEST(RK3, IsShuOsherCompositionOfEulerSteps) {
  Coefficients c = Coefficients::zeros(16);
  std::fill(c.sigma_a.begin(), c.sigma_a.end(), 0.5);
  std::fill(c.q0.begin(), c.q0.end(), 0.2);
  Square s(c, reflective());
  const DGField u = project_initial(s.space, [](double x, double y) {
    return MomentVector{1.0 + 0.5 * std::sin(3 * x) * std::cos(2 * y), 0.2 * x, -0.1 * y};
  });
  const double dt = 0.01;
  auto euler = [&](const DGField& v, double t) {
    DGField out(s.space);
    linear_combination(out, 1.0, v, dt, s.op.evaluate(v, t));
    return out;
  };
  const DGField s1 = euler(u, 0.0);
  DGField s2(s.space);
  linear_combination(s2, 0.75, u, 0.25, euler(s1, dt));
  DGField s3(s.space);
  linear_combination(s3, 1.0 / 3.0, u, 2.0 / 3.0, euler(s2, 0.5 * dt));
  const DGField out = ssp_rk3_step(u, 0.0, dt, s.op, parse_limiter_label("SLinf"));
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out.data()[i], s3.data()[i], 1e-15) << i;
}

TEST(RK3, ObserverSeesEveryStage) {
  Square s(Coefficients::zeros(16), reflective());
  const DGField u = project_initial(s.space, [](double, double) { return MomentVector{1.0, 0.0, 0.0}; });
  std::vector<std::pair<int, double>> seen;
  ssp_rk3_step(u, 1.0, 0.1, s.op, parse_limiter_label("CRL0"), 1, nullptr,
               [&](const DGField&, int stage, double t, const PipelineReport&) { seen.emplace_back(stage, t); });
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen[0], std::make_pair(1, 1.1));
  EXPECT_EQ(seen[1], std::make_pair(2, 1.05));
  EXPECT_EQ(seen[2], std::make_pair(3, 1.1));
}

TEST(Run, ZeroFinalTimeReturnsProjection) {
  Square s(Coefficients::zeros(16), reflective());
  const DGField u = project_initial(s.space, [](double x, double) { return MomentVector{1.0 + x, 2.0 * x, 0.0}; });
  RunOptions opt;
  opt.T = 0.0;
  const RunResult r = run(s.op, u, parse_limiter_label("CRL0"), opt);
  EXPECT_EQ(r.field.data(), u.data());
  EXPECT_EQ(r.steps, 0u);
  EXPECT_EQ(r.time, 0.0);
}

TEST(Run, SamplesAndFinalTime) {
  Square s(Coefficients::zeros(16), reflective());
  const DGField u = project_initial(s.space, [](double x, double y) {
    return MomentVector{1.0 + 0.5 * std::exp(-20 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5))), 0.0, 0.0};
  });
  RunOptions opt;
  opt.T = 0.3;
  opt.samples = 4;
  std::vector<double> times;
  opt.sample_observer = [&](const DGField&, double t, const RealizabilityStats&) { times.push_back(t); };
  const RunResult r = run(s.op, u, parse_limiter_label("CRL0"), opt);
  EXPECT_EQ(r.time, 0.3);
  ASSERT_EQ(r.series.size(), 4u);
  ASSERT_EQ(times.size(), 5u);
  EXPECT_EQ(times.front(), 0.0);
  for (int i = 1; i <= 4; ++i) EXPECT_NEAR(times[i], 0.075 * i, 1e-15);
  EXPECT_LE(r.dt_max, compute_dt(s.mesh, s.op.coefficients(), 2));
  for (const auto& st : r.series) {
    EXPECT_EQ(st.bad_means, 0u);
    EXPECT_EQ(st.bad_nodes, 0u);
  }
}

TEST(Run, RejectsBadOptions) {
  Square s(Coefficients::zeros(16), reflective());
  const DGField u = project_initial(s.space, [](double, double) { return MomentVector{1.0, 0.0, 0.0}; });
  RunOptions opt;
  opt.T = -1.0;
  EXPECT_THROW(run(s.op, u, parse_limiter_label("CRL0"), opt), ConfigError);
  opt.T = 1.0;
  opt.samples = 0;
  EXPECT_THROW(run(s.op, u, parse_limiter_label("CRL0"), opt), ConfigError);
}

TEST(Run, ShadowReachesSteadyStateOnCoarseMesh) {
  ScenarioConfig sc = builtin("shadow");
  sc.h = 0.5;
  sc.k = 0;
  sc.steady_tol = 1e-6;
  const Discretization d = discretize(sc);
  RunOptions opt;
  opt.samples = 1;
  const RunResult r = run_scenario(sc, d, opt);
  EXPECT_TRUE(r.steady_reached);
  EXPECT_LT(r.final_residual, 1e-6);
  EXPECT_LT(r.time, sc.T);
  EXPECT_EQ(r.series.back().bad_means, 0u);
}
