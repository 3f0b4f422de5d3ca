#include "m1dg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

} // namespace

Mesh::Mesh(CellKind kind, std::vector<Vec2> vertices, std::vector<std::array<int, 4>> cells,
           std::vector<std::array<int, 3>> boundary_tags)
    : kind_(kind), vertices_(std::move(vertices)) {
  const int nv = kind == CellKind::Triangle ? 3 : 4;
  cells_.reserve(cells.size());
  jac_.reserve(cells.size());
  inv_t_.reserve(cells.size());

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto ids = cells[c];
    for (int i = 0; i < nv; ++i) {
      if (ids[i] < 0 || ids[i] >= static_cast<int>(vertices_.size())) {
        throw ConfigError(fmt::format("cell {} references missing vertex {}", c, ids[i]));
      }
    }
    Cell cell;
    cell.kind = kind;
    cell.vertex_count = nv;
    double twice_area = 0.0;
    for (int i = 0; i < nv; ++i) {
      twice_area += cross(vertices_[ids[i]] - vertices_[ids[0]], vertices_[ids[(i + 1) % nv]] - vertices_[ids[0]]);
    }
    if (twice_area < 0.0) {
      std::reverse(ids.begin(), ids.begin() + nv);
      twice_area = -twice_area;
    }
    if (!(twice_area > 0.0)) throw ConfigError(fmt::format("cell {} has zero area", c));
    cell.vertex_ids = ids;
    cell.area = 0.5 * twice_area;

    std::array<double, 4> a{};
    if (kind == CellKind::Triangle) {
      const Vec2 p0 = vertices_[ids[0]], p1 = vertices_[ids[1]], p2 = vertices_[ids[2]];
      cell.centroid = (p0 + p1 + p2) / 3.0;
      a = {p1.x - p0.x, p2.x - p0.x, p1.y - p0.y, p2.y - p0.y};
    } else {
      const Vec2 p0 = vertices_[ids[0]], p2 = vertices_[ids[2]];
      cell.centroid = 0.5 * (p0 + p2);
      a = {p2.x - p0.x, 0.0, 0.0, p2.y - p0.y};
      const Vec2 p1 = vertices_[ids[1]], p3 = vertices_[ids[3]];
      const double tol = 1e-10 * (std::abs(a[0]) + std::abs(a[3]));
      const bool aligned = (std::abs(p1.y - p0.y) <= tol && std::abs(p1.x - p2.x) <= tol && std::abs(p3.x - p0.x) <= tol &&
                            std::abs(p3.y - p2.y) <= tol) ||
                           (std::abs(p1.x - p0.x) <= tol && std::abs(p1.y - p2.y) <= tol && std::abs(p3.y - p0.y) <= tol &&
                            std::abs(p3.x - p2.x) <= tol);
      if (!aligned) {
        throw ConfigError(fmt::format("cell {} is not an axis-aligned rectangle", c));
      }
      cell.area = std::abs(a[0] * a[3]);
    }
    const double det = a[0] * a[3] - a[1] * a[2];
    jac_.push_back(a);
    inv_t_.push_back({a[3] / det, -a[2] / det, -a[1] / det, a[0] / det});
    cells_.push_back(cell);
  }

  std::map<std::pair<int, int>, int> tags;
  for (const auto& t : boundary_tags) tags[edge_key(t[0], t[1])] = t[2];

  std::map<std::pair<int, int>, int> lookup;
  faces_.assign(cells_.size() * nv, Face{});
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& ids = cells_[c].vertex_ids;
    for (int j = 0; j < nv; ++j) {
      const int a = ids[j], b = ids[(j + 1) % nv];
      const Vec2 d = vertices_[b] - vertices_[a];
      Face& face = faces_[c * nv + j];
      face.length = norm(d);
      face.normal = Vec2{d.y, -d.x} / face.length;
      const auto key = edge_key(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Edge e;
        e.vertex_ids = {a, b};
        e.length = face.length;
        e.normal = face.normal;
        e.left_cell = static_cast<int>(c);
        lookup.emplace(key, static_cast<int>(edges_.size()));
        face.edge = static_cast<int>(edges_.size());
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.right_cell >= 0) {
          throw ConfigError(fmt::format("edge ({}, {}) is shared by more than two cells", a, b));
        }
        if (e.vertex_ids[0] != b) {
          throw ConfigError(fmt::format("cells {} and {} have inconsistent orientation", e.left_cell, c));
        }
        e.right_cell = static_cast<int>(c);
        face.edge = it->second;
      }
    }
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int j = 0; j < nv; ++j) {
      Face& face = faces_[c * nv + j];
      const Edge& e = edges_[face.edge];
      if (e.is_boundary()) continue;
      face.neighbor = e.left_cell == static_cast<int>(c) ? e.right_cell : e.left_cell;
      for (int q = 0; q < nv; ++q) {
        if (faces_[face.neighbor * nv + q].edge == face.edge) face.neighbor_face = q;
      }
    }
  }
  for (auto& e : edges_) {
    if (!e.is_boundary()) continue;
    auto it = tags.find(edge_key(e.vertex_ids[0], e.vertex_ids[1]));
    if (it != tags.end()) e.boundary_tag = it->second;
  }
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    faces_[i].boundary_tag = edges_[faces_[i].edge].boundary_tag;
  }
}

std::span<const Face> Mesh::faces(std::size_t c) const {
  const std::size_t nv = edge_count(kind_);
  return {faces_.data() + c * nv, nv};
}

Vec2 Mesh::to_physical(std::size_t c, Vec2 ref) const {
  const auto& a = jac_[c];
  const Vec2 o = kind_ == CellKind::Triangle ? vertices_[cells_[c].vertex_ids[0]] : cells_[c].centroid;
  return {o.x + a[0] * ref.x + a[1] * ref.y, o.y + a[2] * ref.x + a[3] * ref.y};
}

Vec2 Mesh::physical_gradient(std::size_t c, Vec2 g) const {
  const auto& m = inv_t_[c];
  return {m[0] * g.x + m[1] * g.y, m[2] * g.x + m[3] * g.y};
}

double Mesh::total_area() const {
  // Neumaier summation
  double s = 0.0, comp = 0.0;
  for (const auto& c : cells_) {
    const double t = s + c.area;
    comp += std::abs(s) >= c.area ? (s - t) + c.area : (c.area - t) + s;
    s = t;
  }
  return s + comp;
}

double Mesh::min_h() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& e : edges_) h = std::min(h, e.length);
  return h;
}

void Mesh::set_structure(const Box& b, int nx, int ny) {
  domain_ = b;
  nx_ = nx;
  ny_ = ny;
  dx_ = b.width() / nx;
  dy_ = b.height() / ny;
  const double tol = 1e-9 * std::max(b.width(), b.height());
  for (auto& e : edges_) {
    if (!e.is_boundary() || e.boundary_tag != boundary::kUntagged) continue;
    const Vec2 m = 0.5 * (vertices_[e.vertex_ids[0]] + vertices_[e.vertex_ids[1]]);
    if (std::abs(m.y - b.ymin) < tol) e.boundary_tag = boundary::kBottom;
    else if (std::abs(m.x - b.xmax) < tol) e.boundary_tag = boundary::kRight;
    else if (std::abs(m.y - b.ymax) < tol) e.boundary_tag = boundary::kTop;
    else if (std::abs(m.x - b.xmin) < tol) e.boundary_tag = boundary::kLeft;
  }
  for (auto& f : faces_) f.boundary_tag = edges_[f.edge].boundary_tag;
}

namespace {

std::pair<int, int> grid_size(const Box& domain, double h) {
  if (!(domain.width() > 0.0 && domain.height() > 0.0)) {
    throw ConfigError("domain extents must be positive");
  }
  if (!(h > 0.0)) throw ConfigError(fmt::format("mesh size h must be positive, got {}", h));
  const int nx = std::max(1, static_cast<int>(std::lround(domain.width() / h)));
  const int ny = std::max(1, static_cast<int>(std::lround(domain.height() / h)));
  return {nx, ny};
}

std::vector<Vec2> lattice(const Box& b, int nx, int ny) {
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.push_back({i == nx ? b.xmax : b.xmin + b.width() * i / nx,
                   j == ny ? b.ymax : b.ymin + b.height() * j / ny});
  return v;
}

} // namespace

Mesh build_rect_mesh(const Box& domain, double h) {
  const auto [nx, ny] = grid_size(domain, h);
  auto v = lattice(domain, nx, ny);
  std::vector<std::array<int, 4>> cells;
  cells.reserve(static_cast<std::size_t>(nx) * ny);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  Mesh m(CellKind::Rectangle, std::move(v), std::move(cells));
  m.set_structure(domain, nx, ny);
  return m;
}

Mesh build_tri_mesh_from_rect(const Box& domain, double h, TriangleSplit split) {
  const auto [nx, ny] = grid_size(domain, h);
  auto v = lattice(domain, nx, ny);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 4>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (split == TriangleSplit::TwoWay) {
        cells.push_back({a, b, c, -1});
        cells.push_back({a, c, d, -1});
      } else {
        const int m = static_cast<int>(v.size());
        v.push_back(0.5 * (v[a] + v[c]));
        cells.push_back({a, b, m, -1});
        cells.push_back({b, c, m, -1});
        cells.push_back({c, d, m, -1});
        cells.push_back({d, a, m, -1});
      }
    }
  }
  Mesh mesh(CellKind::Triangle, std::move(v), std::move(cells));
  mesh.set_structure(domain, nx, ny);
  return mesh;
}

Mesh import_tri_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto next_line = [&](std::istringstream& out) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = std::istringstream(raw);
      return true;
    }
    return false;
  };
  auto expect_count = [&](const char* what) {
    std::istringstream ls;
    if (!next_line(ls)) throw ParseError(fmt::format("missing {} count", what), line_no);
    long n = -1;
    if (!(ls >> n) || n < 0) throw ParseError(fmt::format("invalid {} count", what), line_no);
    return static_cast<int>(n);
  };

  const int nnodes = expect_count("node");
  std::vector<Vec2> nodes;
  for (int i = 0; i < nnodes; ++i) {
    std::istringstream ls;
    if (!next_line(ls)) throw ParseError("unexpected end of node list", line_no);
    Vec2 p;
    if (!(ls >> p.x >> p.y)) throw ParseError(fmt::format("node {}: expected 'x y'", i + 1), line_no);
    nodes.push_back(p);
  }

  const int nelem = expect_count("element");
  std::vector<std::array<int, 4>> cells;
  std::set<std::array<int, 3>> seen;
  for (int e = 0; e < nelem; ++e) {
    std::istringstream ls;
    if (!next_line(ls)) throw ParseError("unexpected end of element list", line_no);
    std::array<int, 3> t{};
    if (!(ls >> t[0] >> t[1] >> t[2])) {
      throw ParseError(fmt::format("element {}: expected 'i j k'", e + 1), line_no);
    }
    for (int& x : t) {
      if (x < 1 || x > nnodes) {
        throw ParseError(fmt::format("element {} references node {} of {}", e + 1, x, nnodes), line_no);
      }
      --x;
    }
    const double a2 = cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
    if (a2 == 0.0) throw ParseError(fmt::format("element {} has zero area", e + 1), line_no);
    auto sorted = t;
    std::sort(sorted.begin(), sorted.end());
    if (!seen.insert(sorted).second) throw ParseError(fmt::format("element {} is a duplicate", e + 1), line_no);
    cells.push_back({t[0], t[1], t[2], -1});
  }

  std::vector<std::array<int, 3>> tags;
  std::istringstream ls;
  if (next_line(ls)) {
    long nb = -1;
    if (!(ls >> nb) || nb < 0) throw ParseError("invalid boundary count", line_no);
    for (long b = 0; b < nb; ++b) {
      std::istringstream bl;
      if (!next_line(bl)) throw ParseError("unexpected end of boundary list", line_no);
      int i = 0, j = 0, tag = 0;
      if (!(bl >> i >> j >> tag)) throw ParseError("boundary line: expected 'i j tag'", line_no);
      if (i < 1 || i > nnodes || j < 1 || j > nnodes) {
        throw ParseError(fmt::format("boundary line references missing node"), line_no);
      }
      tags.push_back({i - 1, j - 1, tag});
    }
  }
  try {
    return Mesh(CellKind::Triangle, std::move(nodes), std::move(cells), std::move(tags));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), line_no);
  }
}

} // namespace m1dg
