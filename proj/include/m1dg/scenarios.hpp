#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "m1dg/dg_operator.hpp"
#include "m1dg/dg_space.hpp"
#include "m1dg/diagnostics.hpp"
#include "m1dg/fv_reference.hpp"
#include "m1dg/limiters.hpp"
#include "m1dg/mesh.hpp"
#include "m1dg/time_stepper.hpp"

namespace m1dg {

enum class MeshKind { Rect, TriFourWay, TriTwoWay };

MeshKind parse_mesh_kind(const std::string& s);
std::string mesh_kind_name(MeshKind k);

struct ScenarioConfig {
  std::string name;
  Box domain;
  double h = 0.1;
  double T = 0.0;
  bool steady = false;
  double steady_tol = 1e-8;
  ScalarField sigma_a, sigma_s, q0, q1x, q1y;
  PointFunction initial;
  std::map<int, BoundaryCondition> boundary;  // tags 1..4
  MeshKind mesh = MeshKind::Rect;
  int k = 2;
  LimiterConfig limiter;

  /// Throws ConfigError on negative cross sections or non-realizable data.
  void validate() const;
};

std::vector<std::string> builtin_names();
ScenarioConfig builtin(const std::string& name);

/// Owns mesh, space and operator of one scenario.
struct Discretization {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<DGSpace> space;
  std::unique_ptr<DGOperator> op;
};

Mesh build_mesh(const ScenarioConfig& sc);
Discretization discretize(const ScenarioConfig& sc, int workers = 1);
DGField initial_field(const Discretization& d, const ScenarioConfig& sc);

/// Runs the scenario from its initial projection; T, steady flags and the
/// limiter come from the scenario.
RunResult run_scenario(const ScenarioConfig& sc, const Discretization& d, RunOptions opt);

// ---- reference solution

/// Uniform grid with nx cells across; ny follows the aspect ratio.
FVGrid reference_grid(const ScenarioConfig& sc, int nx);
FVRunResult run_reference(const ScenarioConfig& sc, int nx, int workers = 1);

// ---- limiter convergence study

PointFunction limiter_study_field(double xi);

struct StudyRow {
  double inv_h = 0.0;
  double e1 = 0.0;
  double order1 = 0.0;  // NaN on the first row
  double einf = 0.0;
  double orderinf = 0.0;
  double theta_max = 0.0;
};

struct LimiterStudyConfig {
  double xi = 1e-4;
  int k = 2;
  std::vector<int> grids{5, 10, 20, 40, 80};
  MeshKind mesh = MeshKind::Rect;
};

std::vector<StudyRow> run_limiter_study(const LimiterStudyConfig& cfg);

// ---- M selection

/// The fixed grid of TVB constants searched by select_M.
const std::vector<double>& m_grid();

struct MSelection {
  double best_M = 0.0;
  std::vector<std::pair<double, double>> errors;  // (M, error); inf for blow-ups
};

MSelection select_M(const ScenarioConfig& sc, const FVGrid& reference, int workers = 1);

} // namespace m1dg
