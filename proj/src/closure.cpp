#include "m1dg/closure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

namespace {

constexpr double kIsotropicCutoff = 1e-14;

void require_unit_fraction(double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw DomainError(fmt::format("normalized flux f = {} outside [0, 1]", f));
  }
}

void require_realizable(const MomentVector& u, const char* who) {
  if (!is_realizable(u)) {
    throw DomainError(fmt::format("{}: state ({}, {}, {}) is not realizable", who, u.psi0,
                                  u.psi1x, u.psi1y));
  }
}

double matrix_one_norm(const Matrix3& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

} // namespace

double eddington_chi(double f) {
  require_unit_fraction(f);
  return (3.0 + 4.0 * f * f) / (5.0 + 2.0 * std::sqrt(4.0 - 3.0 * f * f));
}

double eddington_chi_prime(double f) {
  require_unit_fraction(f);
  const double n = 3.0 + 4.0 * f * f;
  const double s = std::sqrt(4.0 - 3.0 * f * f);
  const double d = 5.0 + 2.0 * s;
  return (8.0 * f * d + 6.0 * f * n / s) / (d * d);
}

double normalized_flux(const MomentVector& u) { return norm(u.psi1()) / u.psi0; }

bool is_realizable(const MomentVector& u) {
  return u.psi0 > 0.0 && norm(u.psi1()) <= u.psi0;
}

bool is_strictly_realizable(const MomentVector& u) {
  return u.psi0 > 0.0 && norm(u.psi1()) < u.psi0;
}

double distance_to_boundary(const MomentVector& u) { return u.psi0 - norm(u.psi1()); }

PressureTensor closure_pressure(const MomentVector& u) {
  require_realizable(u, "closure_pressure");
  const double len = norm(u.psi1());
  const double f = std::min(len / u.psi0, 1.0);
  const double chi = eddington_chi(f);
  const double a = 0.5 * (1.0 - chi) * u.psi0;
  if (f < kIsotropicCutoff) return {a, 0.0, a, a};
  const double b = 0.5 * (3.0 * chi - 1.0) * u.psi0;
  const double mx = u.psi1x / len;
  const double my = u.psi1y / len;
  return {a + b * mx * mx, b * mx * my, a + b * my * my, a};
}

Flux flux(const MomentVector& u) {
  const PressureTensor p = closure_pressure(u);
  return {{u.psi1x, p.xx, p.xy}, {u.psi1y, p.xy, p.yy}};
}

State3 normal_flux(const MomentVector& u, Vec2 n) {
  const PressureTensor p = closure_pressure(u);
  const Vec2 pn = p.apply(n);
  return {dot(u.psi1(), n), pn.x, pn.y};
}

Matrix3 directional_jacobian(const MomentVector& u, Vec2 n) {
  require_realizable(u, "directional_jacobian");
  if (!is_strictly_realizable(u)) {
    throw SingularityError("directional_jacobian: state lies on the realizability boundary");
  }
  Matrix3 j = Matrix3::Zero();
  j(0, 1) = n.x;
  j(0, 2) = n.y;

  const double len = norm(u.psi1());
  const double f = len / u.psi0;
  if (f < kIsotropicCutoff) {
    j(1, 0) = n.x / 3.0;
    j(2, 0) = n.y / 3.0;
    return j;
  }
  const double chi = eddington_chi(f);
  const double dchi = eddington_chi_prime(f);
  const double a = 0.5 * (1.0 - chi);
  const double b = 0.5 * (3.0 * chi - 1.0);
  const double da = -0.5 * dchi;
  const double db = 1.5 * dchi;

  const Eigen::Vector2d nv(n.x, n.y);
  const Eigen::Vector2d m(u.psi1x / len, u.psi1y / len);
  const double mn = m.dot(nv);
  const Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - m * m.transpose();

  const Eigen::Vector2d d0 = a * nv + b * mn * m - f * (da * nv + db * mn * m);
  const Eigen::Matrix2d d1 = da * nv * m.transpose() + db * mn * m * m.transpose() +
                             (b / f) * (m * nv.transpose() * proj + mn * proj);
  j.block<2, 1>(1, 0) = d0;
  j.block<2, 2>(1, 1) = d1;
  return j;
}

EigenDecomposition eigendecomposition(const MomentVector& u, Vec2 n) {
  const Matrix3 j = directional_jacobian(u, n);
  Eigen::EigenSolver<Matrix3> solver(j, true);
  if (solver.info() != Eigen::Success) {
    throw ConditioningError("eigendecomposition: eigensolver did not converge",
                            std::numeric_limits<double>::infinity());
  }
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(values(i).imag()) > 1e-10 * (1.0 + std::abs(values(i).real()))) {
      throw ConditioningError("eigendecomposition: complex eigenvalues",
                              std::numeric_limits<double>::infinity());
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int p, int q) { return values(p).real() < values(q).real(); });

  EigenDecomposition out;
  for (int c = 0; c < 3; ++c) {
    out.eigenvalues[c] = values(order[c]).real();
    out.right_matrix.col(c) = vectors.col(order[c]).real();
  }
  Eigen::FullPivLU<Matrix3> lu(out.right_matrix);
  if (!lu.isInvertible()) {
    throw ConditioningError("eigendecomposition: singular eigenvector matrix",
                            std::numeric_limits<double>::infinity());
  }
  out.left_matrix = lu.inverse();
  out.condition_estimate = matrix_one_norm(out.right_matrix) * matrix_one_norm(out.left_matrix);
  if (!(out.condition_estimate <= kMaxEigenCondition)) {
    throw ConditioningError(
        fmt::format("eigendecomposition: condition estimate {:.3e} too large",
                    out.condition_estimate),
        out.condition_estimate);
  }
  return out;
}

MomentVector realizability_fix(const MomentVector& u, double eps) {
  MomentVector v = u;
  if (!(v.psi0 >= eps)) v.psi0 = eps;
  const double limit = 1.0 - eps;
  const double len = norm(v.psi1());
  if (len > limit * v.psi0) {
    const double s = limit * v.psi0 / len;
    v.psi1x *= s;
    v.psi1y *= s;
    // rounding can leave the rescaled vector a hair outside
    while (norm(v.psi1()) > limit * v.psi0) {
      v.psi1x = std::nextafter(v.psi1x, 0.0);
      v.psi1y = std::nextafter(v.psi1y, 0.0);
    }
  }
  return v;
}

} // namespace m1dg
