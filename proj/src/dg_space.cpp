#include "m1dg/dg_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

DGSpace::DGSpace(const Mesh& mesh, int k)
    : mesh_(&mesh), k_(k), basis_(mesh.kind(), k), edge_rule_(gauss_legendre(k + 1)) {
  const CellRule vol = volume_rule(mesh.kind(), k);
  volume_ = tabulate(vol.points, vol.weights);
  for (int j = 0; j < edge_count(mesh.kind()); ++j) {
    std::vector<Vec2> pts;
    for (double t : edge_rule_.nodes) pts.push_back(reference_edge_point(mesh.kind(), j, t));
    faces_.push_back(tabulate(std::move(pts), edge_rule_.weights));
  }
  nodes_ = tabulate(realizability_nodes(mesh.kind(), k));
}

Tabulation DGSpace::tabulate(std::vector<Vec2> points, std::vector<double> weights) const {
  Tabulation t;
  t.stride = basis_.size();
  t.points = std::move(points);
  t.weights = std::move(weights);
  t.phi.resize(t.points.size() * t.stride);
  t.grad.resize(t.points.size() * t.stride);
  for (std::size_t q = 0; q < t.points.size(); ++q) {
    for (int i = 0; i < t.stride; ++i) {
      t.phi[q * t.stride + i] = basis_.value(i, t.points[q]);
      t.grad[q * t.stride + i] = basis_.gradient(i, t.points[q]);
    }
  }
  return t;
}

DGField::DGField(const DGSpace& space)
    : space_(&space), nb_(space.num_basis()), block_(3 * static_cast<std::size_t>(nb_)),
      data_(space.num_dofs(), 0.0) {}

MomentVector DGField::mean(std::size_t c) const {
  const double* b = cell(c);
  return {b[0], b[nb_], b[2 * nb_]};
}

void DGField::set_mean(std::size_t c, const MomentVector& u) {
  double* b = cell(c);
  b[0] = u.psi0;
  b[nb_] = u.psi1x;
  b[2 * nb_] = u.psi1y;
}

MomentVector DGField::eval(std::size_t c, const double* phi) const {
  const double* b = cell(c);
  MomentVector u;
  for (int i = 0; i < nb_; ++i) {
    u.psi0 += b[i] * phi[i];
    u.psi1x += b[nb_ + i] * phi[i];
    u.psi1y += b[2 * nb_ + i] * phi[i];
  }
  return u;
}

MomentVector DGField::eval_at(std::size_t c, Vec2 ref) const {
  std::vector<double> phi(nb_);
  space_->basis().values(ref, phi.data());
  return eval(c, phi.data());
}

void linear_combination(DGField& out, double a, const DGField& x, double b, const DGField& y) {
  auto& o = out.data();
  const auto& xs = x.data();
  const auto& ys = y.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xs[i] + b * ys[i];
}

DGField project_with_rule(const DGSpace& space, const PointFunction& f, const CellRule& rule) {
  DGField out(space);
  const Tabulation tab = space.tabulate(rule.points, rule.weights);
  const int nb = space.num_basis();
  for (std::size_t c = 0; c < space.num_cells(); ++c) {
    double* blk = out.cell(c);
    for (std::size_t q = 0; q < tab.size(); ++q) {
      const Vec2 x = space.mesh().to_physical(c, tab.points[q]);
      const MomentVector u = f(x.x, x.y);
      if (!std::isfinite(u.psi0) || !std::isfinite(u.psi1x) || !std::isfinite(u.psi1y)) {
        throw DataError(fmt::format("non-finite initial value in cell {} at ({}, {})", c, x.x, x.y));
      }
      const double* phi = tab.row(q);
      const double w = tab.weights[q];
      for (int i = 0; i < nb; ++i) {
        blk[i] += w * u.psi0 * phi[i];
        blk[nb + i] += w * u.psi1x * phi[i];
        blk[2 * nb + i] += w * u.psi1y * phi[i];
      }
    }
  }
  return out;
}

namespace {

// Sub-cell of the reference element: origin + A r over the reference cell.
struct SubCell {
  Vec2 origin;
  double a11, a12, a21, a22;
  int depth;
};

class AdaptiveIntegrator {
public:
  AdaptiveIntegrator(const DGSpace& space, const PointFunction& f, const AdaptiveProjection& opt)
      : space_(space), f_(f), opt_(opt), nb_(space.num_basis()), kind_(space.mesh().kind()),
        rule_(norm_rule(kind_, 4, 1)), phi_(nb_) {}

  void cell(std::size_t c, double* out) {
    c_ = c;
    const SubCell root{{0.0, 0.0}, 1.0, 0.0, 0.0, 1.0, 0};
    std::vector<double> coarse(3 * nb_, 0.0);
    integrate(root, coarse.data());
    scale_ = 0.0;
    for (int comp = 0; comp < 3; ++comp) scale_ = std::max(scale_, std::abs(coarse[comp * nb_]));
    std::fill(out, out + 3 * nb_, 0.0);
    refine(root, coarse, out);
  }

private:
  std::array<SubCell, 4> children(const SubCell& s) const {
    const double h11 = 0.5 * s.a11, h12 = 0.5 * s.a12, h21 = 0.5 * s.a21, h22 = 0.5 * s.a22;
    auto at = [&](double x, double y) { return s.origin + Vec2{s.a11 * x + s.a12 * y, s.a21 * x + s.a22 * y}; };
    const int d = s.depth + 1;
    if (kind_ == CellKind::Rectangle) {
      return {SubCell{at(-0.25, -0.25), h11, h12, h21, h22, d}, SubCell{at(0.25, -0.25), h11, h12, h21, h22, d},
              SubCell{at(-0.25, 0.25), h11, h12, h21, h22, d}, SubCell{at(0.25, 0.25), h11, h12, h21, h22, d}};
    }
    return {SubCell{at(0.0, 0.0), h11, h12, h21, h22, d}, SubCell{at(0.5, 0.0), h11, h12, h21, h22, d},
            SubCell{at(0.0, 0.5), h11, h12, h21, h22, d}, SubCell{at(0.5, 0.5), -h11, -h12, -h21, -h22, d}};
  }

  void integrate(const SubCell& s, double* acc) {
    const double jac = std::abs(s.a11 * s.a22 - s.a12 * s.a21);
    for (std::size_t q = 0; q < rule_.points.size(); ++q) {
      const Vec2 r = rule_.points[q];
      const Vec2 ref = s.origin + Vec2{s.a11 * r.x + s.a12 * r.y, s.a21 * r.x + s.a22 * r.y};
      const Vec2 x = space_.mesh().to_physical(c_, ref);
      const MomentVector u = f_(x.x, x.y);
      if (!std::isfinite(u.psi0) || !std::isfinite(u.psi1x) || !std::isfinite(u.psi1y)) {
        throw DataError(fmt::format("non-finite initial value in cell {} at ({}, {})", c_, x.x, x.y));
      }
      space_.basis().values(ref, phi_.data());
      const double w = rule_.weights[q] * jac;
      for (int i = 0; i < nb_; ++i) {
        acc[i] += w * u.psi0 * phi_[i];
        acc[nb_ + i] += w * u.psi1x * phi_[i];
        acc[2 * nb_ + i] += w * u.psi1y * phi_[i];
      }
    }
  }

  void refine(const SubCell& s, const std::vector<double>& coarse, double* out) {
    const auto kids = children(s);
    std::array<std::vector<double>, 4> parts;
    std::vector<double> fine(3 * nb_, 0.0);
    for (int i = 0; i < 4; ++i) {
      parts[i].assign(3 * nb_, 0.0);
      integrate(kids[i], parts[i].data());
      for (int m = 0; m < 3 * nb_; ++m) fine[m] += parts[i][m];
    }
    double diff = 0.0;
    for (int m = 0; m < 3 * nb_; ++m) diff = std::max(diff, std::abs(fine[m] - coarse[m]));
    const double allowed = opt_.rel_tol * scale_ * std::ldexp(1.0, -s.depth);
    if (diff <= allowed || s.depth + 1 >= opt_.max_depth) {
      for (int m = 0; m < 3 * nb_; ++m) out[m] += fine[m];
      return;
    }
    for (int i = 0; i < 4; ++i) refine(kids[i], parts[i], out);
  }

  const DGSpace& space_;
  const PointFunction& f_;
  AdaptiveProjection opt_;
  int nb_;
  CellKind kind_;
  CellRule rule_;
  std::vector<double> phi_;
  std::size_t c_ = 0;
  double scale_ = 0.0;
};

} // namespace

DGField project_initial(const DGSpace& space, const PointFunction& f, const AdaptiveProjection& opt) {
  DGField out(space);
  AdaptiveIntegrator integ(space, f, opt);
  for (std::size_t c = 0; c < space.num_cells(); ++c) integ.cell(c, out.cell(c));
  return out;
}

} // namespace m1dg
