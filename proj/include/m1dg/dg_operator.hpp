#pragma once

#include <functional>
#include <map>
#include <vector>

#include "m1dg/closure.hpp"
#include "m1dg/dg_space.hpp"

namespace m1dg {

enum class BoundaryKind { Dirichlet, Vacuum, Reflective };

using BoundaryFunction = std::function<MomentVector(double x, double y, double t)>;

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Vacuum;
  BoundaryFunction data;  // Dirichlet only
  MomentVector floor{1e-10, 0.0, 0.0};

  static BoundaryCondition dirichlet(BoundaryFunction f);
  static BoundaryCondition dirichlet(MomentVector u);
  static BoundaryCondition vacuum(MomentVector floor = {1e-10, 0.0, 0.0});
  static BoundaryCondition reflective();
};

/// Ghost data per boundary tag.
class GhostPolicy {
public:
  void set(int tag, BoundaryCondition bc) { bcs_[tag] = std::move(bc); }
  void set_all(const BoundaryCondition& bc);
  bool has(int tag) const { return bcs_.count(tag) > 0; }
  const BoundaryCondition& at(int tag) const;

private:
  std::map<int, BoundaryCondition> bcs_;
};

MomentVector ghost_state(const MomentVector& inner, const BoundaryCondition& bc, Vec2 n, Vec2 x, double t);

/// Piecewise constant coefficients, one value per cell.
struct Coefficients {
  std::vector<double> sigma_a, sigma_s, q0, q1x, q1y;
  static Coefficients zeros(std::size_t n);
  double max_sigma() const;
};

using ScalarField = std::function<double(double, double)>;
/// Samples fields at the cell centroids.
Coefficients sample_coefficients(const Mesh& mesh, const ScalarField& sigma_a, const ScalarField& sigma_s,
                                 const ScalarField& q0, const ScalarField& q1x = {},
                                 const ScalarField& q1y = {});

State3 lax_friedrichs_flux(const MomentVector& a, const MomentVector& b, Vec2 n, double alpha = 1.0);

struct OperatorOptions {
  double alpha = 1.0;
  double eps_fix = 1e-12;
  int workers = 1;
};

/// Semi-discrete operator L_h of the DG scheme.
class DGOperator {
public:
  DGOperator(const DGSpace& space, GhostPolicy ghosts, Coefficients coeffs, OperatorOptions opt = {});

  void evaluate(const DGField& u, double t, DGField& rate) const;
  DGField evaluate(const DGField& u, double t) const;

  const DGSpace& space() const { return *space_; }
  const GhostPolicy& ghosts() const { return ghosts_; }
  const Coefficients& coefficients() const { return coeffs_; }
  const OperatorOptions& options() const { return opt_; }
  void set_workers(int w) { opt_.workers = w; }

  /// Ghost cell mean across local face j of a boundary cell; used by the slope limiter.
  MomentVector boundary_ghost_mean(std::size_t cell, int face, const MomentVector& inner, double t) const;

private:
  void evaluate_cell(const DGField& u, double t, std::size_t c, double* out) const;

  const DGSpace* space_;
  GhostPolicy ghosts_;
  Coefficients coeffs_;
  OperatorOptions opt_;
};

} // namespace m1dg
