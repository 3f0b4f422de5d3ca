#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "m1dg/dg_space.hpp"

namespace m1dg {

struct RealizabilityStats {
  double time = 0.0;
  double pct_gp = 0.0;  // non-realizable S_k^K node values, percent
  double pct_cm = 0.0;  // non-realizable cell means, percent
  double theta_max = 0.0;
  std::size_t bad_nodes = 0;
  std::size_t bad_means = 0;
};

/// Exact cone predicate on every cell mean and every S_k^K node value.
RealizabilityStats realizability_stats(const DGField& field, double time = 0.0, double theta_max = 0.0);

struct ErrorNorms {
  double e1 = 0.0;
  double einf = 0.0;
};

using ScalarExact = std::function<double(double, double)>;

/// E1 = integral of |exact - psi0_h| and Einf = max over the same nodes:
/// n x n Gauss per cell (collapsed on triangles), optionally subdivided.
ErrorNorms error_norms(const DGField& field, const ScalarExact& exact, int n = 5, int subdivisions = 1);

/// log2(E_coarse / E_fine) / log2(h_coarse / h_fine).
double convergence_order(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct FVGrid;

struct LogSobolevResult {
  double value = 0.0;
  double l2_part = 0.0;
  double gradient_part = 0.0;
  std::size_t clamped = 0;
};

/// Log-Sobolev distance of psi0 between a DG field and a reference grid,
/// integrated with equal weights at the reference cell centers.
LogSobolevResult log_sobolev_error(const DGField& field, const FVGrid& reference);

/// Locates the cell containing a point on meshes generated from a box.
std::size_t locate_cell(const Mesh& mesh, Vec2 x, Vec2* ref = nullptr);

} // namespace m1dg
