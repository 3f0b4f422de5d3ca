#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "m1dg/error.hpp"
#include "m1dg/mesh.hpp"

using namespace m1dg;

namespace {

std::size_t boundary_edges(const Mesh& m) {
  return std::count_if(m.edges().begin(), m.edges().end(), [](const Edge& e) { return e.is_boundary(); });
}

std::set<std::vector<std::pair<long long, long long>>> reflected_cells(const Mesh& m, bool reflect) {
  std::set<std::vector<std::pair<long long, long long>>> out;
  for (const Cell& c : m.cells()) {
    std::vector<std::pair<long long, long long>> key;
    for (int v = 0; v < c.vertex_count; ++v) {
      const Vec2 p = m.vertices()[c.vertex_ids[v]];
      key.emplace_back(std::llround((reflect ? -p.x : p.x) * 1e9), std::llround(p.y * 1e9));
    }
    std::sort(key.begin(), key.end());
    out.insert(key);
  }
  return out;
}

} // namespace

TEST(RectMesh, UnitSquareCounts) {
  const Mesh m = build_rect_mesh({0, 1, 0, 1}, 0.5);
  EXPECT_EQ(m.num_cells(), 4u);
  EXPECT_EQ(m.edges().size(), 12u);
  EXPECT_EQ(boundary_edges(m), 8u);
}

TEST(RectMesh, LineSourceResolution) {
  const Mesh m = build_rect_mesh({-0.5, 0.5, -0.5, 0.5}, 0.004);
  EXPECT_EQ(m.nx(), 250);
  EXPECT_EQ(m.ny(), 250);
  EXPECT_EQ(m.num_cells(), 62500u);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
}

TEST(RectMesh, BoundaryTagsBySide) {
  const Mesh m = build_rect_mesh({0, 2, 0, 1}, 0.25);
  std::array<int, 5> count{};
  for (const Edge& e : m.edges()) {
    if (e.is_boundary()) ++count[e.boundary_tag];
  }
  EXPECT_EQ(count[0], 0);
  EXPECT_EQ(count[boundary::kBottom], 8);
  EXPECT_EQ(count[boundary::kTop], 8);
  EXPECT_EQ(count[boundary::kLeft], 4);
  EXPECT_EQ(count[boundary::kRight], 4);
}

TEST(RectMesh, FacesAreConsistent) {
  const Mesh m = build_rect_mesh({0, 1, 0, 1}, 0.25);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    Vec2 sum;
    for (const Face& f : m.faces(c)) {
      sum += f.length * f.normal;
      if (f.is_boundary()) continue;
      const Face& back = m.faces(f.neighbor)[f.neighbor_face];
      EXPECT_EQ(back.neighbor, static_cast<int>(c));
      EXPECT_NEAR(back.normal.x, -f.normal.x, 1e-15);
      EXPECT_NEAR(back.normal.y, -f.normal.y, 1e-15);
    }
    EXPECT_NEAR(sum.x, 0.0, 1e-15);
    EXPECT_NEAR(sum.y, 0.0, 1e-15);
  }
}

TEST(TriMesh, FourWaySplit) {
  const Mesh m = build_tri_mesh_from_rect({0, 1, 0, 1}, 1.0, TriangleSplit::FourWay);
  ASSERT_EQ(m.num_cells(), 4u);
  for (const Cell& c : m.cells()) EXPECT_NEAR(c.area, 0.25, 1e-15);
}

TEST(TriMesh, TwoWaySplit) {
  const Mesh m = build_tri_mesh_from_rect({0, 1, 0, 1}, 0.5, TriangleSplit::TwoWay);
  EXPECT_EQ(m.num_cells(), 8u);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
}

TEST(TriMesh, FourWayIsMirrorSymmetric) {
  const Mesh m = build_tri_mesh_from_rect({-1, 1, -1, 1}, 0.25, TriangleSplit::FourWay);
  EXPECT_EQ(reflected_cells(m, false), reflected_cells(m, true));
}

TEST(TriMesh, AreaSumsToDomain) {
  for (double h : {0.3, 0.1, 0.07}) {
    const Mesh m = build_tri_mesh_from_rect({-5, 5, -5, 5}, h, TriangleSplit::FourWay);
    EXPECT_NEAR(m.total_area(), 100.0, 1e-12 * 100.0);
  }
}

TEST(ImportMesh, SingleTriangle) {
  const Mesh m = import_tri_mesh("3\n0 0\n1 0\n0 1\n1\n1 2 3\n");
  ASSERT_EQ(m.num_cells(), 1u);
  EXPECT_NEAR(m.cell(0).area, 0.5, 1e-15);
  std::vector<double> len;
  for (const Edge& e : m.edges()) len.push_back(e.length);
  std::sort(len.begin(), len.end());
  EXPECT_NEAR(len[0], 1.0, 1e-15);
  EXPECT_NEAR(len[1], 1.0, 1e-15);
  EXPECT_NEAR(len[2], std::sqrt(2.0), 1e-15);
}

TEST(ImportMesh, ClockwiseIsReordered) {
  const Mesh m = import_tri_mesh("# clockwise\n3\n0 0\n1 0\n0 1\n1\n1 3 2\n");
  EXPECT_NEAR(m.cell(0).area, 0.5, 1e-15);
  const auto a = m.jacobian(0);
  EXPECT_GT(a[0] * a[3] - a[1] * a[2], 0.0);
}

TEST(ImportMesh, DanglingNodeNamesElement) {
  try {
    import_tri_mesh("3\n0 0\n1 0\n0 1\n1\n1 2 7\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("element 1"), std::string::npos);
    EXPECT_EQ(e.line(), 6);
  }
}

TEST(ImportMesh, RejectsDegenerateAndDuplicate) {
  EXPECT_THROW(import_tri_mesh("3\n0 0\n1 0\n2 0\n1\n1 2 3\n"), ParseError);
  EXPECT_THROW(import_tri_mesh("3\n0 0\n1 0\n0 1\n2\n1 2 3\n3 1 2\n"), ParseError);
}

TEST(ImportMesh, BoundaryTags) {
  const Mesh m = import_tri_mesh("4\n0 0\n1 0\n1 1\n0 1\n2\n1 2 3\n1 3 4\n2\n1 2 1\n2 3 2\n");
  int tagged = 0;
  for (const Edge& e : m.edges()) tagged += e.boundary_tag != 0;
  EXPECT_EQ(tagged, 2);
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(build_rect_mesh({0, 1, 0, 1}, 0.0), ConfigError);
  EXPECT_THROW(Mesh(CellKind::Rectangle, {{0, 0}, {1, 0}, {1.5, 1}, {0, 1}}, {{0, 1, 2, 3}}), ConfigError);
  EXPECT_THROW(Mesh(CellKind::Triangle, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 5, -1}}), ConfigError);
}

TEST(Mesh, AffineMapsRoundTrip) {
  const Mesh m = build_tri_mesh_from_rect({0, 2, 0, 1}, 0.5, TriangleSplit::FourWay);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const Cell& cell = m.cell(c);
    for (int v = 0; v < 3; ++v) {
      const Vec2 ref = v == 0 ? Vec2{0, 0} : (v == 1 ? Vec2{1, 0} : Vec2{0, 1});
      const Vec2 x = m.to_physical(c, ref);
      EXPECT_NEAR(x.x, m.vertices()[cell.vertex_ids[v]].x, 1e-15);
      EXPECT_NEAR(x.y, m.vertices()[cell.vertex_ids[v]].y, 1e-15);
    }
  }
}
