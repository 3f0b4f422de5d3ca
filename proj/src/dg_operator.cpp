#include "m1dg/dg_operator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "m1dg/error.hpp"
#include "m1dg/parallel.hpp"

namespace m1dg {

BoundaryCondition BoundaryCondition::dirichlet(BoundaryFunction f) {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Dirichlet;
  bc.data = std::move(f);
  return bc;
}

BoundaryCondition BoundaryCondition::dirichlet(MomentVector u) {
  return dirichlet([u](double, double, double) { return u; });
}

BoundaryCondition BoundaryCondition::vacuum(MomentVector floor) {
  if (!is_strictly_realizable(floor)) throw ConfigError("vacuum floor state must be strictly realizable");
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Vacuum;
  bc.floor = floor;
  return bc;
}

BoundaryCondition BoundaryCondition::reflective() {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Reflective;
  return bc;
}

void GhostPolicy::set_all(const BoundaryCondition& bc) {
  for (int tag = boundary::kUntagged; tag <= boundary::kLeft; ++tag) bcs_[tag] = bc;
}

const BoundaryCondition& GhostPolicy::at(int tag) const {
  auto it = bcs_.find(tag);
  if (it == bcs_.end()) throw ConfigError(fmt::format("no boundary condition configured for tag {}", tag));
  return it->second;
}

MomentVector ghost_state(const MomentVector& inner, const BoundaryCondition& bc, Vec2 n, Vec2 x, double t) {
  switch (bc.kind) {
  case BoundaryKind::Dirichlet:
    return bc.data(x.x, x.y, t);
  case BoundaryKind::Vacuum:
    return bc.floor;
  case BoundaryKind::Reflective: {
    const double pn = inner.psi1x * n.x + inner.psi1y * n.y;
    return {inner.psi0, inner.psi1x - 2.0 * pn * n.x, inner.psi1y - 2.0 * pn * n.y};
  }
  }
  return inner;
}

Coefficients Coefficients::zeros(std::size_t n) {
  Coefficients c;
  c.sigma_a.assign(n, 0.0);
  c.sigma_s.assign(n, 0.0);
  c.q0.assign(n, 0.0);
  c.q1x.assign(n, 0.0);
  c.q1y.assign(n, 0.0);
  return c;
}

double Coefficients::max_sigma() const {
  double m = 0.0;
  for (std::size_t i = 0; i < sigma_a.size(); ++i) m = std::max(m, sigma_a[i] + sigma_s[i]);
  return m;
}

Coefficients sample_coefficients(const Mesh& mesh, const ScalarField& sigma_a, const ScalarField& sigma_s,
                                 const ScalarField& q0, const ScalarField& q1x, const ScalarField& q1y) {
  Coefficients c = Coefficients::zeros(mesh.num_cells());
  for (std::size_t i = 0; i < mesh.num_cells(); ++i) {
    const Vec2 x = mesh.cell(i).centroid;
    if (sigma_a) c.sigma_a[i] = sigma_a(x.x, x.y);
    if (sigma_s) c.sigma_s[i] = sigma_s(x.x, x.y);
    if (q0) c.q0[i] = q0(x.x, x.y);
    if (q1x) c.q1x[i] = q1x(x.x, x.y);
    if (q1y) c.q1y[i] = q1y(x.x, x.y);
    if (c.sigma_a[i] < 0.0 || c.sigma_s[i] < 0.0) {
      throw ConfigError(fmt::format("negative cross section in cell {}", i));
    }
  }
  return c;
}

State3 lax_friedrichs_flux(const MomentVector& a, const MomentVector& b, Vec2 n, double alpha) {
  const State3 fa = normal_flux(a, n);
  const State3 fb = normal_flux(b, n);
  return {0.5 * (fa[0] + fb[0] - alpha * (b.psi0 - a.psi0)),
          0.5 * (fa[1] + fb[1] - alpha * (b.psi1x - a.psi1x)),
          0.5 * (fa[2] + fb[2] - alpha * (b.psi1y - a.psi1y))};
}

DGOperator::DGOperator(const DGSpace& space, GhostPolicy ghosts, Coefficients coeffs, OperatorOptions opt)
    : space_(&space), ghosts_(std::move(ghosts)), coeffs_(std::move(coeffs)), opt_(opt) {
  if (coeffs_.sigma_a.size() != space.num_cells()) {
    throw ConfigError("coefficient arrays do not match the mesh");
  }
  for (const auto& e : space.mesh().edges()) {
    if (e.is_boundary()) ghosts_.at(e.boundary_tag);
  }
}

MomentVector DGOperator::boundary_ghost_mean(std::size_t cell, int face, const MomentVector& inner,
                                             double t) const {
  const Face& f = space_->mesh().faces(cell)[face];
  const Vec2 mid = space_->mesh().to_physical(cell, reference_edge_point(space_->mesh().kind(), face, 0.0));
  return ghost_state(inner, ghosts_.at(f.boundary_tag), f.normal, mid, t);
}

void DGOperator::evaluate_cell(const DGField& u, double t, std::size_t c, double* out) const {
  const DGSpace& sp = *space_;
  const Mesh& mesh = sp.mesh();
  const int nb = sp.num_basis();
  const double eps = opt_.eps_fix;
  std::fill(out, out + 3 * nb, 0.0);

  const auto& m = mesh.inverse_transpose(c);
  const Tabulation& vol = sp.volume();
  if (nb > 1) {
    for (std::size_t q = 0; q < vol.size(); ++q) {
      const MomentVector uq = realizability_fix(u.eval(c, vol.row(q)), eps);
      const Flux fl = flux(uq);
      const double w = vol.weights[q];
      const Vec2* g = vol.grad.data() + q * nb;
      for (int comp = 0; comp < 3; ++comp) {
        const double fr = w * (m[0] * fl.F[comp] + m[2] * fl.G[comp]);
        const double gr = w * (m[1] * fl.F[comp] + m[3] * fl.G[comp]);
        for (int i = 1; i < nb; ++i) out[comp * nb + i] += fr * g[i].x + gr * g[i].y;
      }
    }
  }

  const double inv_area = 1.0 / mesh.cell(c).area;
  const auto faces = mesh.faces(c);
  const int ne = static_cast<int>(sp.edge_rule().size());
  for (int j = 0; j < static_cast<int>(faces.size()); ++j) {
    const Face& f = faces[j];
    const Tabulation& tab = sp.face(j);
    const double scale = f.length * inv_area;
    for (int b = 0; b < ne; ++b) {
      const MomentVector ui = u.eval(c, tab.row(b));
      MomentVector uo;
      if (f.is_boundary()) {
        const Vec2 x = mesh.to_physical(c, tab.points[b]);
        uo = ghost_state(ui, ghosts_.at(f.boundary_tag), f.normal, x, t);
      } else {
        uo = u.eval(f.neighbor, sp.face(f.neighbor_face).row(ne - 1 - b));
      }
      const State3 h = lax_friedrichs_flux(realizability_fix(ui, eps), realizability_fix(uo, eps), f.normal,
                                           opt_.alpha);
      const double w = scale * tab.weights[b];
      const double* phi = tab.row(b);
      for (int comp = 0; comp < 3; ++comp) {
        const double wh = w * h[comp];
        for (int i = 0; i < nb; ++i) out[comp * nb + i] -= wh * phi[i];
      }
    }
  }

  const double* uc = u.cell(c);
  const double sa = coeffs_.sigma_a[c];
  const double st = sa + coeffs_.sigma_s[c];
  for (int i = 0; i < nb; ++i) {
    out[i] -= sa * uc[i];
    out[nb + i] -= st * uc[nb + i];
    out[2 * nb + i] -= st * uc[2 * nb + i];
  }
  out[0] += coeffs_.q0[c];
  out[nb] += coeffs_.q1x[c];
  out[2 * nb] += coeffs_.q1y[c];

  for (int i = 0; i < 3 * nb; ++i) {
    if (!std::isfinite(out[i])) {
      throw BlowUpError(fmt::format("non-finite rate in cell {} at t = {}", c, t));
    }
  }
}

void DGOperator::evaluate(const DGField& u, double t, DGField& rate) const {
  if (rate.size() != u.size()) rate = DGField(*space_);
  parallel_for(space_->num_cells(), opt_.workers,
               [&](std::size_t c) { evaluate_cell(u, t, c, rate.cell(c)); });
}

DGField DGOperator::evaluate(const DGField& u, double t) const {
  DGField rate(*space_);
  evaluate(u, t, rate);
  return rate;
}

} // namespace m1dg
