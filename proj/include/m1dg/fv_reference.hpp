#pragma once

#include <functional>
#include <vector>

#include "m1dg/closure.hpp"
#include "m1dg/dg_operator.hpp"
#include "m1dg/geometry.hpp"

namespace m1dg {

/// Cell-centred states on a uniform grid, row-major (j * nx + i).
struct FVGrid {
  Box domain;
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  std::vector<MomentVector> u;

  FVGrid() = default;
  FVGrid(const Box& b, int nx, int ny);
  MomentVector& at(int i, int j) { return u[static_cast<std::size_t>(j) * nx + i]; }
  const MomentVector& at(int i, int j) const { return u[static_cast<std::size_t>(j) * nx + i]; }
  Vec2 center(int i, int j) const;
};

/// Per-cell coefficients of the FV grid, same layout.
struct FVSources {
  std::vector<double> sigma_a, sigma_s, q0, q1x, q1y;
};

/// Boundary ghosts keyed by side tag (1 bottom, 2 right, 3 top, 4 left).
using FVGhosts = GhostPolicy;

FVSources fv_sample_sources(const FVGrid& g, const ScalarField& sigma_a, const ScalarField& sigma_s,
                            const ScalarField& q0, const ScalarField& q1x = {}, const ScalarField& q1y = {});

/// Fraction of the monotone bound dt (1/dx + 1/dy + sigma) <= 1 used by default.
inline constexpr double kFVCfl = 0.45;
double fv_time_step(const FVGrid& g, const FVSources& s, double cfl = kFVCfl);

/// One forward-Euler Lax-Friedrichs step.
FVGrid fv_step(const FVGrid& g, double dt, const FVSources& s, const FVGhosts& ghosts, double t,
               double alpha = 1.0, int workers = 1);

struct FVRunResult {
  FVGrid grid;
  std::size_t steps = 0;
  double time = 0.0;
  std::size_t non_realizable = 0;  // summed over all steps
};

/// Integrates to time T; observer (if set) sees every intermediate grid.
FVRunResult fv_run(FVGrid g, double T, const FVSources& s, const FVGhosts& ghosts, double cfl = kFVCfl,
                   int workers = 1, const std::function<void(const FVGrid&, double)>& observer = {});

/// Centered differences inside, second-order one-sided on the boundary.
std::vector<Vec2> fv_gradients(const FVGrid& g, const std::vector<double>& scalar);
std::vector<Vec2> fv_gradients(const FVGrid& g);  // of psi0

} // namespace m1dg
