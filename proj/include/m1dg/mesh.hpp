#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "m1dg/geometry.hpp"
#include "m1dg/quadrature.hpp"

namespace m1dg {

namespace boundary {
inline constexpr int kUntagged = 0;
inline constexpr int kBottom = 1;
inline constexpr int kRight = 2;
inline constexpr int kTop = 3;
inline constexpr int kLeft = 4;
} // namespace boundary

struct Cell {
  CellKind kind = CellKind::Rectangle;
  std::array<int, 4> vertex_ids{-1, -1, -1, -1};
  int vertex_count = 0;
  double area = 0.0;
  Vec2 centroid;
};

/// Global edge. Normal is outward with respect to left_cell. right_cell < 0
/// marks a boundary edge, tagged by boundary_tag.
struct Edge {
  std::array<int, 2> vertex_ids{-1, -1};
  double length = 0.0;
  Vec2 normal;
  int left_cell = -1;
  int right_cell = -1;
  int boundary_tag = boundary::kUntagged;
  bool is_boundary() const { return right_cell < 0; }
};

/// Local edge j of a cell, from vertex j to vertex j+1 (counterclockwise).
struct Face {
  int edge = -1;
  int neighbor = -1;       // -1 on the boundary
  int neighbor_face = -1;  // local index of the same edge in the neighbor
  int boundary_tag = boundary::kUntagged;
  Vec2 normal;             // outward for this cell
  double length = 0.0;
  bool is_boundary() const { return neighbor < 0; }
};

enum class TriangleSplit { TwoWay, FourWay };

class Mesh {
public:
  Mesh(CellKind kind, std::vector<Vec2> vertices, std::vector<std::array<int, 4>> cells,
       std::vector<std::array<int, 3>> boundary_tags = {});

  CellKind kind() const { return kind_; }
  std::size_t num_cells() const { return cells_.size(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Cell& cell(std::size_t c) const { return cells_[c]; }
  std::span<const Face> faces(std::size_t c) const;

  /// Affine map x = origin + A xi from the reference cell.
  Vec2 to_physical(std::size_t c, Vec2 ref) const;
  /// A^{-T} applied to a reference gradient.
  Vec2 physical_gradient(std::size_t c, Vec2 ref_grad) const;
  std::array<double, 4> jacobian(std::size_t c) const { return jac_[c]; }
  const std::array<double, 4>& inverse_transpose(std::size_t c) const { return inv_t_[c]; }

  double total_area() const;
  double min_h() const;

  /// Set for meshes generated from a box.
  std::optional<Box> domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  void set_structure(const Box& b, int nx, int ny);

private:
  CellKind kind_;
  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  std::vector<Face> faces_;  // edge_count(kind) per cell
  std::vector<std::array<double, 4>> jac_;      // a11 a12 a21 a22
  std::vector<std::array<double, 4>> inv_t_;    // A^{-T}
  std::optional<Box> domain_;
  int nx_ = 0, ny_ = 0;
  double dx_ = 0.0, dy_ = 0.0;
};

Mesh build_rect_mesh(const Box& domain, double h);
Mesh build_tri_mesh_from_rect(const Box& domain, double h, TriangleSplit split);
/// Plain-text node/element listing; see README for the format.
Mesh import_tri_mesh(const std::string& text);

} // namespace m1dg
