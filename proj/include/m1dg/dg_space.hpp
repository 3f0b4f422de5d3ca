#pragma once

#include <functional>
#include <vector>

#include "m1dg/basis.hpp"
#include "m1dg/closure.hpp"
#include "m1dg/mesh.hpp"
#include "m1dg/quadrature.hpp"

namespace m1dg {

/// Tabulated basis values on one point set of the reference cell.
struct Tabulation {
  std::vector<Vec2> points;
  std::vector<double> weights;  // may be empty
  std::vector<double> phi;      // points x basis, row-major
  std::vector<Vec2> grad;       // reference gradients, same layout
  std::size_t size() const { return points.size(); }
  const double* row(std::size_t q) const { return phi.data() + q * stride; }
  int stride = 0;
};

/// Mesh plus degree plus every quadrature table the solver needs.
class DGSpace {
public:
  DGSpace(const Mesh& mesh, int k);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return k_; }
  int num_basis() const { return basis_.size(); }
  std::size_t num_cells() const { return mesh_->num_cells(); }
  std::size_t num_dofs() const { return num_cells() * 3 * num_basis(); }
  const ReferenceBasis& basis() const { return basis_; }

  const Tabulation& volume() const { return volume_; }
  /// Gauss points of local face j, ordered along the counterclockwise direction.
  const Tabulation& face(int j) const { return faces_[j]; }
  const Rule1D& edge_rule() const { return edge_rule_; }
  /// Realizability node set S_k^K.
  const Tabulation& nodes() const { return nodes_; }

  Tabulation tabulate(std::vector<Vec2> points, std::vector<double> weights = {}) const;

private:
  const Mesh* mesh_;
  int k_;
  ReferenceBasis basis_;
  Rule1D edge_rule_;
  Tabulation volume_;
  std::vector<Tabulation> faces_;
  Tabulation nodes_;
};

/// Modal coefficients laid out [cell][component][mode].
class DGField {
public:
  DGField() = default;
  explicit DGField(const DGSpace& space);

  const DGSpace& space() const { return *space_; }
  std::size_t size() const { return data_.size(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double* cell(std::size_t c) { return data_.data() + c * block_; }
  const double* cell(std::size_t c) const { return data_.data() + c * block_; }
  double& coeff(std::size_t c, int comp, int mode) { return cell(c)[comp * nb_ + mode]; }
  double coeff(std::size_t c, int comp, int mode) const { return cell(c)[comp * nb_ + mode]; }

  MomentVector mean(std::size_t c) const;
  void set_mean(std::size_t c, const MomentVector& u);
  /// Evaluates the cell polynomial given a row of basis values.
  MomentVector eval(std::size_t c, const double* phi) const;
  MomentVector eval_at(std::size_t c, Vec2 ref) const;

private:
  const DGSpace* space_ = nullptr;
  int nb_ = 0;
  std::size_t block_ = 0;
  std::vector<double> data_;
};

/// out = a x + b y.
void linear_combination(DGField& out, double a, const DGField& x, double b, const DGField& y);

using PointFunction = std::function<MomentVector(double, double)>;

struct AdaptiveProjection {
  double rel_tol = 1e-10;
  int max_depth = 12;
};

/// Cellwise L2 projection by adaptive quadtree quadrature. A sub-cell is split
/// while its moments change by more than rel_tol times the cell scale, scaled
/// by the sub-cell's relative diameter, so kinks and jumps converge too.
DGField project_initial(const DGSpace& space, const PointFunction& f, const AdaptiveProjection& opt = {});
/// Same with a supplied rule, e.g. an oversampled oracle.
DGField project_with_rule(const DGSpace& space, const PointFunction& f, const CellRule& rule);

} // namespace m1dg
