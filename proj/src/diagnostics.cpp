#include "m1dg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "m1dg/error.hpp"
#include "m1dg/fv_reference.hpp"

namespace m1dg {

RealizabilityStats realizability_stats(const DGField& field, double time, double theta_max) {
  const DGSpace& sp = field.space();
  const Tabulation& nodes = sp.nodes();
  RealizabilityStats st;
  st.time = time;
  st.theta_max = theta_max;
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    if (!is_realizable(field.mean(c))) ++st.bad_means;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      if (!is_realizable(field.eval(c, nodes.row(s)))) ++st.bad_nodes;
    }
  }
  const double nc = static_cast<double>(sp.num_cells());
  st.pct_cm = 100.0 * st.bad_means / nc;
  st.pct_gp = 100.0 * st.bad_nodes / (nc * nodes.size());
  return st;
}

ErrorNorms error_norms(const DGField& field, const ScalarExact& exact, int n, int subdivisions) {
  const DGSpace& sp = field.space();
  const CellRule rule = norm_rule(sp.mesh().kind(), n, subdivisions);
  const Tabulation tab = sp.tabulate(rule.points, rule.weights);
  ErrorNorms e;
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    const double area = sp.mesh().cell(c).area;
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < tab.size(); ++q) {
      const Vec2 x = sp.mesh().to_physical(c, tab.points[q]);
      const double err = std::abs(exact(x.x, x.y) - field.eval(c, tab.row(q)).psi0);
      cell_sum += tab.weights[q] * err;
      e.einf = std::max(e.einf, err);
    }
    e.e1 += area * cell_sum;
  }
  return e;
}

double convergence_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

namespace {

bool inside_triangle(const Mesh& mesh, std::size_t c, Vec2 x, Vec2& ref, double& slack) {
  const auto a = mesh.jacobian(c);
  const Vec2 o = mesh.vertices()[mesh.cell(c).vertex_ids[0]];
  const double det = a[0] * a[3] - a[1] * a[2];
  const Vec2 d = x - o;
  ref = {(a[3] * d.x - a[1] * d.y) / det, (-a[2] * d.x + a[0] * d.y) / det};
  slack = std::min({ref.x, ref.y, 1.0 - ref.x - ref.y});
  return slack >= -1e-12;
}

} // namespace

std::size_t locate_cell(const Mesh& mesh, Vec2 x, Vec2* ref) {
  const auto box = mesh.domain();
  if (box && mesh.nx() > 0) {
    const int i = std::clamp(static_cast<int>(std::floor((x.x - box->xmin) / mesh.dx())), 0, mesh.nx() - 1);
    const int j = std::clamp(static_cast<int>(std::floor((x.y - box->ymin) / mesh.dy())), 0, mesh.ny() - 1);
    const std::size_t r = static_cast<std::size_t>(j) * mesh.nx() + i;
    if (mesh.kind() == CellKind::Rectangle) {
      if (ref) {
        const Cell& cell = mesh.cell(r);
        *ref = {(x.x - cell.centroid.x) / mesh.dx(), (x.y - cell.centroid.y) / mesh.dy()};
      }
      return r;
    }
    const std::size_t per = mesh.num_cells() / (static_cast<std::size_t>(mesh.nx()) * mesh.ny());
    std::size_t best = r * per;
    double best_slack = -std::numeric_limits<double>::infinity();
    Vec2 best_ref;
    for (std::size_t c = r * per; c < (r + 1) * per; ++c) {
      Vec2 rr;
      double slack;
      inside_triangle(mesh, c, x, rr, slack);
      if (slack > best_slack) {
        best_slack = slack;
        best = c;
        best_ref = rr;
      }
    }
    if (ref) *ref = best_ref;
    return best;
  }
  std::size_t best = 0;
  double best_slack = -std::numeric_limits<double>::infinity();
  Vec2 best_ref;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    Vec2 rr;
    double slack;
    if (mesh.kind() == CellKind::Triangle) {
      inside_triangle(mesh, c, x, rr, slack);
    } else {
      const Cell& cell = mesh.cell(c);
      const auto a = mesh.jacobian(c);
      rr = {(x.x - cell.centroid.x) / a[0], (x.y - cell.centroid.y) / a[3]};
      slack = 0.5 - std::max(std::abs(rr.x), std::abs(rr.y));
    }
    if (slack > best_slack) {
      best_slack = slack;
      best = c;
      best_ref = rr;
    }
  }
  if (ref) *ref = best_ref;
  return best;
}

LogSobolevResult log_sobolev_error(const DGField& field, const FVGrid& reference) {
  constexpr double kFloor = 1e-14;
  const DGSpace& sp = field.space();
  const Mesh& mesh = sp.mesh();
  const int nb = sp.num_basis();
  const double ln10 = std::numbers::ln10;

  std::vector<double> ref_log(reference.u.size());
  std::vector<double> ref_val(reference.u.size());
  LogSobolevResult r;
  for (std::size_t k = 0; k < reference.u.size(); ++k) {
    double v = reference.u[k].psi0;
    if (!(v > kFloor)) {
      v = kFloor;
      ++r.clamped;
    }
    ref_val[k] = v;
    ref_log[k] = std::log10(v);
  }
  const std::vector<Vec2> ref_grad = fv_gradients(reference, ref_val);

  std::vector<double> phi(nb);
  double l2 = 0.0, h1 = 0.0;
  const double w = reference.dx * reference.dy;
  for (int j = 0; j < reference.ny; ++j) {
    for (int i = 0; i < reference.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * reference.nx + i;
      const Vec2 x = reference.center(i, j);
      Vec2 ref;
      const std::size_t c = locate_cell(mesh, x, &ref);
      sp.basis().values(ref, phi.data());
      const double* b = field.cell(c);
      double v = 0.0;
      Vec2 gref;
      for (int m = 0; m < nb; ++m) {
        v += b[m] * phi[m];
        gref += b[m] * sp.basis().gradient(m, ref);
      }
      if (!(v > kFloor)) {
        v = kFloor;
        ++r.clamped;
      }
      const Vec2 g = mesh.physical_gradient(c, gref);
      const double dl = std::log10(v) - ref_log[k];
      const Vec2 dg = g / (v * ln10) - ref_grad[k] / (ref_val[k] * ln10);
      l2 += w * dl * dl;
      h1 += w * dot(dg, dg);
    }
  }
  r.l2_part = std::sqrt(l2);
  r.gradient_part = std::sqrt(h1);
  r.value = r.l2_part + r.gradient_part;
  return r;
}

} // namespace m1dg
