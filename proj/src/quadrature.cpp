#include "m1dg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

Rule1D gauss_legendre(int n) {
  if (n < 1) throw ConfigError(fmt::format("Gauss rule needs n >= 1, got {}", n));
  Rule1D r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (2 * i + 1 == n) x = 0.0;
    double p0 = 1.0, p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/(...) halved
    r.nodes[i] = -0.5 * x;
    r.nodes[n - 1 - i] = 0.5 * x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule1D gauss_rule(int n) {
  if (n < 1 || n > 5) throw ConfigError(fmt::format("Gauss rule supports n = 1..5, got {}", n));
  return gauss_legendre(n);
}

Rule1D gauss_lobatto_rule(int n) {
  if (n == 3) return {{-0.5, 0.0, 0.5}, {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0}};
  if (n == 4) {
    const double a = 0.5 / std::sqrt(5.0);
    return {{-0.5, -a, a, 0.5}, {1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0}};
  }
  throw ConfigError(fmt::format("Gauss-Lobatto rule supports n = 3 or 4, got {}", n));
}

int lobatto_points_for(int k) { return std::max(3, k + 1); }

double lobatto_first_weight(int k) { return gauss_lobatto_rule(lobatto_points_for(k)).weights[0]; }

std::vector<Vec2> reference_vertices(CellKind kind) {
  if (kind == CellKind::Triangle) return {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  return {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
}

double reference_area(CellKind kind) { return kind == CellKind::Triangle ? 0.5 : 1.0; }

int edge_count(CellKind kind) { return kind == CellKind::Triangle ? 3 : 4; }

Vec2 reference_edge_point(CellKind kind, int edge, double t) {
  const auto v = reference_vertices(kind);
  const int n = static_cast<int>(v.size());
  const Vec2 a = v[edge % n];
  const Vec2 b = v[(edge + 1) % n];
  return 0.5 * (a + b) + t * (b - a);
}

CellRule triangle_volume_rule(int k) {
  CellRule r;
  auto add3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({a, a});
    r.points.push_back({b, a});
    r.points.push_back({a, b});
    r.weights.insert(r.weights.end(), 3, w);
  };
  switch (k) {
  case 0:
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
    break;
  case 1:
    add3(1.0 / 6.0, 1.0 / 3.0);
    break;
  case 2:
    add3(0.44594849091596488632, 0.22338158967801146570);
    add3(0.09157621350977074346, 0.10995174365532186764);
    break;
  default:
    throw ConfigError(fmt::format("degree k = {} unsupported (0..2)", k));
  }
  return r;
}

CellRule rectangle_volume_rule() {
  const Rule1D gl = gauss_lobatto_rule(4);
  CellRule r;
  for (std::size_t j = 0; j < gl.size(); ++j) {
    for (std::size_t i = 0; i < gl.size(); ++i) {
      r.points.push_back({gl.nodes[i], gl.nodes[j]});
      r.weights.push_back(gl.weights[i] * gl.weights[j]);
    }
  }
  return r;
}

CellRule volume_rule(CellKind kind, int k) {
  if (k < 0 || k > 2) throw ConfigError(fmt::format("degree k = {} unsupported (0..2)", k));
  return kind == CellKind::Triangle ? triangle_volume_rule(k) : rectangle_volume_rule();
}

CellRule norm_rule(CellKind kind, int n, int subdivisions) {
  const Rule1D g = gauss_legendre(n);
  const int s = std::max(1, subdivisions);
  CellRule r;
  if (kind == CellKind::Rectangle) {
    const double h = 1.0 / s;
    for (int bj = 0; bj < s; ++bj)
      for (int bi = 0; bi < s; ++bi)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            r.points.push_back({-0.5 + (bi + 0.5 + g.nodes[i]) * h, -0.5 + (bj + 0.5 + g.nodes[j]) * h});
            r.weights.push_back(g.weights[i] * g.weights[j] * h * h);
          }
    return r;
  }
  // collapsed Gauss on each sub-triangle of a uniform s x s split
  auto emit = [&](Vec2 p0, Vec2 p1, Vec2 p2) {
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 + g.nodes[j];
      for (int i = 0; i < n; ++i) {
        const double u = 0.5 + g.nodes[i];
        const double l1 = u * (1.0 - v);
        const double l2 = v;
        r.points.push_back(p0 + l1 * (p1 - p0) + l2 * (p2 - p0));
        r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - v) / (s * s));
      }
    }
  };
  const double h = 1.0 / s;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i + j < s; ++i) {
      const Vec2 a{i * h, j * h};
      emit(a, a + Vec2{h, 0.0}, a + Vec2{0.0, h});
      if (i + j < s - 1) emit(a + Vec2{h, 0.0}, a + Vec2{h, h}, a + Vec2{0.0, h});
    }
  }
  return r;
}

double CellMeanDecomposition::edge_weight_total() const {
  double s = 0.0;
  for (const auto& n : nodes) if (n.on_edge) s += n.weight;
  return s;
}

double CellMeanDecomposition::interior_weight_total() const {
  double s = 0.0;
  for (const auto& n : nodes) if (!n.on_edge) s += n.weight;
  return s;
}

double CellMeanDecomposition::weight_total() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

CellMeanDecomposition triangle_cellmean_decomposition(int k) {
  if (k < 0 || k > 2) throw ConfigError(fmt::format("degree k = {} unsupported (0..2)", k));
  const Rule1D g = gauss_legendre(k + 1);
  const Rule1D gl = gauss_lobatto_rule(lobatto_points_for(k));
  const auto v = reference_vertices(CellKind::Triangle);
  CellMeanDecomposition d;
  for (int i = 0; i < 3; ++i) {
    const Vec2 apex = v[i];
    const int edge = (i + 1) % 3;
    // layer s runs from the opposite edge (s = -1/2) to the apex (s = +1/2)
    for (std::size_t a = 0; a < gl.size(); ++a) {
      const double s = gl.nodes[a];
      const double area_factor = 0.5 - s;
      if (area_factor <= 0.0) continue;
      for (std::size_t b = 0; b < g.size(); ++b) {
        const Vec2 e = reference_edge_point(CellKind::Triangle, edge, g.nodes[b]);
        MeanNode node;
        node.on_edge = (a == 0);
        node.point = node.on_edge ? e : (0.5 + s) * apex + area_factor * e;
        node.weight = (2.0 / 3.0) * area_factor * gl.weights[a] * g.weights[b];
        d.nodes.push_back(node);
      }
    }
  }
  return d;
}

CellMeanDecomposition rectangle_cellmean_decomposition(int k, double dx, double dy) {
  if (k < 0 || k > 2) throw ConfigError(fmt::format("degree k = {} unsupported (0..2)", k));
  if (!(dx > 0.0 && dy > 0.0)) throw ConfigError("cell extents must be positive");
  const Rule1D g = gauss_legendre(k + 1);
  const Rule1D gl = gauss_lobatto_rule(lobatto_points_for(k));
  const double mux = dy / (dx + dy);
  const double muy = dx / (dx + dy);
  const std::size_t last = gl.size() - 1;
  CellMeanDecomposition d;
  for (std::size_t a = 0; a < gl.size(); ++a) {
    for (std::size_t b = 0; b < g.size(); ++b) {
      const bool edge = (a == 0 || a == last);
      d.nodes.push_back({{gl.nodes[a], g.nodes[b]}, mux * gl.weights[a] * g.weights[b], edge});
      d.nodes.push_back({{g.nodes[b], gl.nodes[a]}, muy * gl.weights[a] * g.weights[b], edge});
    }
  }
  return d;
}

namespace {

void append_unique(std::vector<Vec2>& out, Vec2 p) {
  for (const auto& q : out) {
    if (std::abs(q.x - p.x) < 1e-15 && std::abs(q.y - p.y) < 1e-15) return;
  }
  out.push_back(p);
}

} // namespace

std::vector<Vec2> realizability_nodes(CellKind kind, int k) {
  std::vector<Vec2> s;
  if (kind == CellKind::Triangle) {
    for (const auto& n : triangle_cellmean_decomposition(k).nodes) append_unique(s, n.point);
    return s;
  }
  for (const auto& p : rectangle_volume_rule().points) append_unique(s, p);
  const Rule1D g = gauss_legendre(k + 1);
  for (int e = 0; e < 4; ++e) {
    for (double t : g.nodes) append_unique(s, reference_edge_point(kind, e, t));
  }
  for (const auto& n : rectangle_cellmean_decomposition(k, 1.0, 1.0).nodes) append_unique(s, n.point);
  return s;
}

} // namespace m1dg
