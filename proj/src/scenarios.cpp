#include "m1dg/scenarios.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

MeshKind parse_mesh_kind(const std::string& s) {
  if (s == "rect") return MeshKind::Rect;
  if (s == "tri" || s == "tri4") return MeshKind::TriFourWay;
  if (s == "tri2") return MeshKind::TriTwoWay;
  throw ConfigError(fmt::format("unknown mesh kind '{}' (rect, tri, tri4, tri2)", s));
}

std::string mesh_kind_name(MeshKind k) {
  switch (k) {
  case MeshKind::Rect: return "rect";
  case MeshKind::TriFourWay: return "tri4";
  case MeshKind::TriTwoWay: return "tri2";
  }
  return "rect";
}

void ScenarioConfig::validate() const {
  if (!(domain.width() > 0.0 && domain.height() > 0.0)) throw ConfigError("domain extents must be positive");
  if (!(h > 0.0)) throw ConfigError(fmt::format("h must be positive, got {}", h));
  if (!(T >= 0.0)) throw ConfigError(fmt::format("T must be non-negative, got {}", T));
  if (k < 0 || k > 2) throw ConfigError(fmt::format("k must be 0, 1 or 2, got {}", k));
  if (!initial) throw ConfigError("scenario has no initial condition");
  limiter.validate();
  for (int tag = boundary::kBottom; tag <= boundary::kLeft; ++tag) {
    if (!boundary.count(tag)) throw ConfigError(fmt::format("scenario '{}' lacks a boundary condition for side {}", name, tag));
  }
  constexpr int n = 64;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double x = domain.xmin + domain.width() * i / n;
      const double y = domain.ymin + domain.height() * j / n;
      if (sigma_a && sigma_a(x, y) < 0.0) throw ConfigError("sigma_a must be non-negative");
      if (sigma_s && sigma_s(x, y) < 0.0) throw ConfigError("sigma_s must be non-negative");
      const MomentVector u = initial(x, y);
      if (!is_realizable(u)) {
        throw ConfigError(fmt::format("initial condition not realizable at ({}, {})", x, y));
      }
    }
  }
  for (const auto& [tag, bc] : boundary) {
    if (bc.kind != BoundaryKind::Dirichlet) continue;
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      Vec2 p;
      switch (tag) {
      case boundary::kBottom: p = {domain.xmin + s * domain.width(), domain.ymin}; break;
      case boundary::kRight: p = {domain.xmax, domain.ymin + s * domain.height()}; break;
      case boundary::kTop: p = {domain.xmin + s * domain.width(), domain.ymax}; break;
      default: p = {domain.xmin, domain.ymin + s * domain.height()}; break;
      }
      if (!is_realizable(bc.data(p.x, p.y, 0.0))) {
        throw ConfigError(fmt::format("boundary data on side {} not realizable at ({}, {})", tag, p.x, p.y));
      }
    }
  }
}

namespace {

constexpr double kFloor = 1e-10;

ScalarField indicator_disk(double r, double value) {
  return [r2 = r * r, value](double x, double y) { return x * x + y * y <= r2 ? value : 0.0; };
}

void set_all(ScenarioConfig& sc, const BoundaryCondition& bc) {
  for (int tag = boundary::kBottom; tag <= boundary::kLeft; ++tag) sc.boundary[tag] = bc;
}

ScenarioConfig line_source() {
  ScenarioConfig sc;
  sc.name = "line_source";
  sc.domain = {-0.5, 0.5, -0.5, 0.5};
  sc.h = 0.004;
  sc.T = 0.45;
  const double sigma = 0.02;
  sc.initial = [sigma](double x, double y) {
    return MomentVector{std::max(std::exp(-10.0 * (x * x + y * y) / (sigma * sigma)), 1e-4), 0.0, 0.0};
  };
  auto ic = sc.initial;
  set_all(sc, BoundaryCondition::dirichlet([ic](double x, double y, double) { return ic(x, y); }));
  sc.limiter = parse_limiter_label("CRL22");
  return sc;
}

ScenarioConfig homogeneous_disk(bool addendum) {
  ScenarioConfig sc;
  sc.name = addendum ? "homogeneous_disk-addendum" : "homogeneous_disk";
  sc.domain = {-5.0, 5.0, -5.0, 5.0};
  sc.h = 0.05;
  sc.T = addendum ? 3.75 : 3.0;
  sc.sigma_a = indicator_disk(1.0, 10.0);
  sc.q0 = indicator_disk(1.0, 1.0);
  sc.initial = [](double, double) { return MomentVector{kFloor, 0.0, 0.0}; };
  set_all(sc, addendum ? BoundaryCondition::vacuum() : BoundaryCondition::dirichlet(MomentVector{kFloor, 0.0, 0.0}));
  sc.limiter = parse_limiter_label("CRL0.2");
  return sc;
}

ScenarioConfig flash(bool addendum) {
  ScenarioConfig sc;
  sc.name = addendum ? "flash-addendum" : "flash";
  sc.domain = {-10.0, 10.0, -10.0, 10.0};
  sc.h = 0.06;
  sc.T = 6.0;
  const double r2 = addendum ? 25.0 : 0.25;
  sc.initial = [r2](double x, double y) {
    return x * x + y * y <= r2 ? MomentVector{1.0, 0.9, 0.0} : MomentVector{kFloor, 0.0, 0.0};
  };
  set_all(sc, addendum ? BoundaryCondition::vacuum() : BoundaryCondition::dirichlet(MomentVector{kFloor, 0.0, 0.0}));
  sc.limiter = parse_limiter_label("CRL0.5");
  return sc;
}

ScenarioConfig shadow() {
  ScenarioConfig sc;
  sc.name = "shadow";
  sc.domain = {0.0, 12.0, 0.0, 6.0};
  sc.h = 0.04;
  sc.T = 30.0;
  sc.steady = true;
  sc.sigma_a = [](double x, double y) { return (x >= 2.0 && x <= 3.0 && y >= 0.0 && y <= 2.0) ? 50.0 : 0.0; };
  sc.initial = [](double, double) { return MomentVector{kFloor, 0.0, 0.0}; };
  sc.boundary[boundary::kBottom] = BoundaryCondition::reflective();
  sc.boundary[boundary::kTop] = BoundaryCondition::reflective();
  sc.boundary[boundary::kRight] = BoundaryCondition::vacuum();
  sc.boundary[boundary::kLeft] = BoundaryCondition::dirichlet(MomentVector{1.0, 0.99, 0.0});
  sc.limiter = parse_limiter_label("CRL0");
  return sc;
}

ScenarioConfig two_beams() {
  ScenarioConfig sc;
  sc.name = "two_beams";
  sc.domain = {0.0, 7.0, 0.0, 7.0};
  sc.h = 0.05;
  sc.T = 7.0;
  const MomentVector low{1e-4, 0.0, 0.0};
  sc.initial = [low](double, double) { return low; };
  sc.boundary[boundary::kLeft] = BoundaryCondition::dirichlet([low](double, double y, double) {
    return (y >= 3.0 && y <= 4.0) ? MomentVector{100.0, 99.9, 0.0} : low;
  });
  sc.boundary[boundary::kBottom] = BoundaryCondition::dirichlet([low](double x, double, double) {
    return (x >= 3.0 && x <= 4.0) ? MomentVector{100.0, 0.0, 99.9} : low;
  });
  sc.boundary[boundary::kRight] = BoundaryCondition::dirichlet(low);
  sc.boundary[boundary::kTop] = BoundaryCondition::dirichlet(low);
  sc.limiter = parse_limiter_label("CRL0");
  return sc;
}

} // namespace

std::vector<std::string> builtin_names() {
  return {"line_source", "homogeneous_disk", "homogeneous_disk-addendum", "flash", "flash-addendum", "shadow",
          "two_beams"};
}

ScenarioConfig builtin(const std::string& name) {
  if (name == "line_source") return line_source();
  if (name == "homogeneous_disk") return homogeneous_disk(false);
  if (name == "homogeneous_disk-addendum") return homogeneous_disk(true);
  if (name == "flash") return flash(false);
  if (name == "flash-addendum") return flash(true);
  if (name == "shadow") return shadow();
  if (name == "two_beams") return two_beams();
  std::string names;
  for (const auto& n : builtin_names()) names += " " + n;
  throw ConfigError(fmt::format("unknown scenario '{}'; builtins:{}", name, names));
}

Mesh build_mesh(const ScenarioConfig& sc) {
  switch (sc.mesh) {
  case MeshKind::Rect: return build_rect_mesh(sc.domain, sc.h);
  case MeshKind::TriFourWay: return build_tri_mesh_from_rect(sc.domain, sc.h, TriangleSplit::FourWay);
  case MeshKind::TriTwoWay: return build_tri_mesh_from_rect(sc.domain, sc.h, TriangleSplit::TwoWay);
  }
  throw ConfigError("unknown mesh kind");
}

Discretization discretize(const ScenarioConfig& sc, int workers) {
  sc.validate();
  Discretization d;
  d.mesh = std::make_unique<Mesh>(build_mesh(sc));
  d.space = std::make_unique<DGSpace>(*d.mesh, sc.k);
  GhostPolicy ghosts;
  for (const auto& [tag, bc] : sc.boundary) ghosts.set(tag, bc);
  if (!ghosts.has(boundary::kUntagged)) ghosts.set(boundary::kUntagged, BoundaryCondition::vacuum());
  Coefficients coeffs = sample_coefficients(*d.mesh, sc.sigma_a, sc.sigma_s, sc.q0, sc.q1x, sc.q1y);
  OperatorOptions opt;
  opt.eps_fix = sc.limiter.eps_fix;
  opt.workers = workers;
  d.op = std::make_unique<DGOperator>(*d.space, std::move(ghosts), std::move(coeffs), opt);
  return d;
}

DGField initial_field(const Discretization& d, const ScenarioConfig& sc) {
  return project_initial(*d.space, sc.initial);
}

RunResult run_scenario(const ScenarioConfig& sc, const Discretization& d, RunOptions opt) {
  opt.T = sc.T;
  opt.steady = sc.steady;
  opt.steady_tol = sc.steady_tol;
  return run(*d.op, initial_field(d, sc), sc.limiter, opt);
}

FVGrid reference_grid(const ScenarioConfig& sc, int nx) {
  if (nx < 1) throw ConfigError(fmt::format("reference resolution must be positive, got {}", nx));
  const int ny = std::max(1, static_cast<int>(std::lround(nx * sc.domain.height() / sc.domain.width())));
  FVGrid g(sc.domain, nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 x = g.center(i, j);
      g.at(i, j) = sc.initial(x.x, x.y);
    }
  return g;
}

FVRunResult run_reference(const ScenarioConfig& sc, int nx, int workers) {
  sc.validate();
  FVGrid g = reference_grid(sc, nx);
  const FVSources s = fv_sample_sources(g, sc.sigma_a, sc.sigma_s, sc.q0, sc.q1x, sc.q1y);
  GhostPolicy ghosts;
  for (const auto& [tag, bc] : sc.boundary) ghosts.set(tag, bc);
  return fv_run(std::move(g), sc.T, s, ghosts, kFVCfl, workers);
}

PointFunction limiter_study_field(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError(fmt::format("xi must lie in [0, 1], got {}", xi));
  const MomentVector u0 = (1.0 - xi) * MomentVector{1.0, 1.0, 0.0} + xi * MomentVector{1.0, 0.0, 0.0};
  const MomentVector u1 = 1e-6 * ((1.0 - xi) * MomentVector{1.0, 0.0, 1.0} + xi * MomentVector{1.0, 0.0, 0.0});
  return [u0, u1](double x, double y) {
    const double lam = 0.5 * (std::cos(2.0 * std::numbers::pi * (x + y)) + 1.0);
    return (1.0 - lam) * u0 + lam * u1;
  };
}

std::vector<StudyRow> run_limiter_study(const LimiterStudyConfig& cfg) {
  if (!(cfg.xi >= 0.0)) throw ConfigError(fmt::format("xi must be non-negative, got {}", cfg.xi));
  if (cfg.k < 0 || cfg.k > 2) throw ConfigError(fmt::format("k must be 0, 1 or 2, got {}", cfg.k));
  if (cfg.grids.empty()) throw ConfigError("study needs at least one grid");
  for (std::size_t i = 0; i < cfg.grids.size(); ++i) {
    if (cfg.grids[i] < 1) throw ConfigError("grid sizes must be positive");
    if (i > 0 && cfg.grids[i] <= cfg.grids[i - 1]) throw ConfigError("grid sizes must be ascending");
  }
  const PointFunction f = limiter_study_field(cfg.xi);
  const ScalarExact exact = [&f](double x, double y) { return f(x, y).psi0; };
  std::vector<StudyRow> rows;
  for (int n : cfg.grids) {
    ScenarioConfig sc;
    sc.domain = {0.0, 1.0, 0.0, 1.0};
    sc.h = 1.0 / n;
    sc.mesh = cfg.mesh;
    const Mesh mesh = build_mesh(sc);
    const DGSpace space(mesh, cfg.k);
    DGField u = project_initial(space, f);
    const ThetaReport th = apply_realizability_limiter(u);
    const ErrorNorms e = error_norms(u, exact, 5);
    StudyRow row;
    row.inv_h = n;
    row.e1 = e.e1;
    row.einf = e.einf;
    row.theta_max = th.theta_max;
    row.order1 = row.orderinf = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty()) {
      const StudyRow& p = rows.back();
      row.order1 = convergence_order(p.e1, row.e1, 1.0 / p.inv_h, 1.0 / n);
      row.orderinf = convergence_order(p.einf, row.einf, 1.0 / p.inv_h, 1.0 / n);
    }
    rows.push_back(row);
  }
  return rows;
}

const std::vector<double>& m_grid() {
  static const std::vector<double> grid{0.1, 0.2, 0.5, 1.0, 2.0, 10.0, 22.0, 46.0, 100.0, 150.0};
  return grid;
}

MSelection select_M(const ScenarioConfig& base, const FVGrid& reference, int workers) {
  MSelection sel;
  double best = std::numeric_limits<double>::infinity();
  sel.best_M = m_grid().front();
  for (double M : m_grid()) {
    ScenarioConfig sc = base;
    if (sc.limiter.slope_mode == SlopeMode::Off) sc.limiter.slope_mode = SlopeMode::Characteristic;
    sc.limiter.M = M;
    double err = std::numeric_limits<double>::infinity();
    try {
      const Discretization d = discretize(sc, workers);
      RunOptions opt;
      opt.workers = workers;
      const RunResult r = run_scenario(sc, d, opt);
      err = log_sobolev_error(r.field, reference).value;
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    } catch (const BlowUpError&) {
    } catch (const LimiterError&) {
    }
    sel.errors.emplace_back(M, err);
    if (err < best) {
      best = err;
      sel.best_M = M;
    }
  }
  return sel;
}

} // namespace m1dg
