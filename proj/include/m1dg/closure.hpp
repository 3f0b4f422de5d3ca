#pragma once

#include <array>

#include <Eigen/Dense>

#include "m1dg/geometry.hpp"

namespace m1dg {

/// Conserved M1 state (psi0, psi1x, psi1y).
struct MomentVector {
  double psi0 = 0.0;
  double psi1x = 0.0;
  double psi1y = 0.0;

  constexpr Vec2 psi1() const { return {psi1x, psi1y}; }
  constexpr double operator[](int i) const { return i == 0 ? psi0 : (i == 1 ? psi1x : psi1y); }
  constexpr double& operator[](int i) { return i == 0 ? psi0 : (i == 1 ? psi1x : psi1y); }

  constexpr MomentVector& operator+=(const MomentVector& o) {
    psi0 += o.psi0; psi1x += o.psi1x; psi1y += o.psi1y;
    return *this;
  }
  constexpr MomentVector& operator-=(const MomentVector& o) {
    psi0 -= o.psi0; psi1x -= o.psi1x; psi1y -= o.psi1y;
    return *this;
  }
  constexpr MomentVector& operator*=(double s) {
    psi0 *= s; psi1x *= s; psi1y *= s;
    return *this;
  }
  friend constexpr MomentVector operator+(MomentVector a, const MomentVector& b) { return a += b; }
  friend constexpr MomentVector operator-(MomentVector a, const MomentVector& b) { return a -= b; }
  friend constexpr MomentVector operator*(double s, MomentVector a) { return a *= s; }
  friend constexpr MomentVector operator*(MomentVector a, double s) { return a *= s; }
  friend constexpr bool operator==(const MomentVector&, const MomentVector&) = default;
};

/// Symmetric second moment; xy stored once.
struct PressureTensor {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
  double zz = 0.0;  // out-of-plane component of the full second moment

  constexpr double trace() const { return xx + yy + zz; }
  constexpr Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

using State3 = std::array<double, 3>;

struct Flux {
  State3 F{};
  State3 G{};
};

using Matrix3 = Eigen::Matrix3d;

struct EigenDecomposition {
  std::array<double, 3> eigenvalues{};  // ascending
  Matrix3 right_matrix = Matrix3::Identity();
  Matrix3 left_matrix = Matrix3::Identity();
  double condition_estimate = 1.0;
};

/// Condition estimates above this raise ConditioningError.
inline constexpr double kMaxEigenCondition = 1e13;

double eddington_chi(double f);
/// dχ/df, analytic.
double eddington_chi_prime(double f);

/// |ψ¹|/ψ⁰ without any check.
double normalized_flux(const MomentVector& u);

PressureTensor closure_pressure(const MomentVector& u);
Flux flux(const MomentVector& u);
/// n·𝓕(U) = F nx + G ny.
State3 normal_flux(const MomentVector& u, Vec2 n);

Matrix3 directional_jacobian(const MomentVector& u, Vec2 n);
EigenDecomposition eigendecomposition(const MomentVector& u, Vec2 n);

/// Closed cone predicate, no tolerance.
bool is_realizable(const MomentVector& u);
bool is_strictly_realizable(const MomentVector& u);
double distance_to_boundary(const MomentVector& u);

MomentVector realizability_fix(const MomentVector& u, double eps = 1e-12);

} // namespace m1dg
