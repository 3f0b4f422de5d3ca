#pragma once

#include <vector>

#include "m1dg/geometry.hpp"
#include "m1dg/quadrature.hpp"

namespace m1dg {

/// Total-degree polynomial basis on a reference cell, orthonormal with respect
/// to the reference mean: mean(phi_i phi_j) = delta_ij, phi_0 = 1.
class ReferenceBasis {
public:
  ReferenceBasis(CellKind kind, int k);

  CellKind kind() const { return kind_; }
  int degree() const { return k_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  double value(int i, Vec2 p) const;
  /// Gradient with respect to reference coordinates.
  Vec2 gradient(int i, Vec2 p) const;
  void values(Vec2 p, double* out) const;

  /// Exact mean of xi^a eta^b over the reference cell.
  static double monomial_mean(CellKind kind, int a, int b);

  /// Gram matrix mean(phi_i phi_j) evaluated exactly.
  std::vector<double> gram() const;

private:
  CellKind kind_;
  int k_;
  std::vector<std::pair<int, int>> exps_;    // monomial exponents, degree-graded
  std::vector<std::vector<double>> coeffs_;  // basis function i over monomials
};

inline int basis_size(int k) { return (k + 1) * (k + 2) / 2; }

} // namespace m1dg
