#pragma once

#include <vector>

#include "m1dg/geometry.hpp"

namespace m1dg {

/// 1D rule on [-1/2, 1/2]; weights sum to 1.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Rule on a reference cell. Weights are fractions of the cell area (sum 1).
struct CellRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

enum class CellKind { Rectangle, Triangle };

/// Gauss-Legendre, any n >= 1.
Rule1D gauss_legendre(int n);
/// Gauss-Legendre restricted to the supported range n = 1..5.
Rule1D gauss_rule(int n);
Rule1D gauss_lobatto_rule(int n);

/// Number of Gauss-Lobatto points needed for realizability at degree k.
int lobatto_points_for(int k);
/// First Gauss-Lobatto weight of that rule (1/6 for the three point rule).
double lobatto_first_weight(int k);

/// Reference triangle (0,0), (1,0), (0,1); reference square [-1/2,1/2]^2.
std::vector<Vec2> reference_vertices(CellKind kind);
double reference_area(CellKind kind);

/// Symmetric rule exact for degree 2k (at least 1).
CellRule triangle_volume_rule(int k);
CellRule rectangle_volume_rule();
CellRule volume_rule(CellKind kind, int k);

/// Tensor Gauss on the square, collapsed Gauss on the triangle; used for error norms.
CellRule norm_rule(CellKind kind, int n, int subdivisions = 1);

/// Point on local edge j of the reference cell at parameter t in [-1/2, 1/2].
/// Edge j runs counterclockwise from vertex j to vertex j+1.
Vec2 reference_edge_point(CellKind kind, int edge, double t);
int edge_count(CellKind kind);

/// One entry of a cell-mean decomposition.
struct MeanNode {
  Vec2 point;
  double weight = 0.0;
  bool on_edge = false;
};

/// Convex decomposition of the cell mean into point values.
struct CellMeanDecomposition {
  std::vector<MeanNode> nodes;
  double edge_weight_total() const;
  double interior_weight_total() const;
  double weight_total() const;
};

/// Three collapsed projections of a Gauss x Gauss-Lobatto tensor rule.
CellMeanDecomposition triangle_cellmean_decomposition(int k);
/// Gauss-Lobatto x Gauss tensor rules in both directions, mixed with the
/// weights dy/(dx+dy) and dx/(dx+dy).
CellMeanDecomposition rectangle_cellmean_decomposition(int k, double dx, double dy);

/// Realizability node set S_k^K in reference coordinates, deduplicated.
std::vector<Vec2> realizability_nodes(CellKind kind, int k);

} // namespace m1dg
