// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_SPACE_HPP
#define PLATE_SPACE_HPP

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "plate/element.hpp"
#include "plate/geometry.hpp"

namespace plate {

/// Conforming Lagrange space of degree k on a mesh, scalar or 2-vector.
/// Vector spaces interleave components: global dof 2*i+c is component c of
/// scalar node i.
class FeSpace {
 public:
  FeSpace(const Mesh& mesh, int degree, int components = 1);

  const Mesh& mesh() const { return *mesh_; }
  const ReferenceElement& element() const { return ref_; }
  int degree() const { return ref_.degree(); }
  int components() const { return components_; }
  int num_scalar_dofs() const { return num_scalar_dofs_; }
  int num_dofs() const { return components_ * num_scalar_dofs_; }

  const std::vector<int>& element_scalar_dofs(int e) const { return elem_dofs_[e]; }
  const Eigen::Vector2d& dof_coord(int scalar_dof) const { return dof_coords_[scalar_dof]; }

  // Geometry mapping of element e.
  Eigen::Vector2d to_physical(int e, const Eigen::Vector2d& ref) const;
  Eigen::Matrix2d jacobian(int e, const Eigen::Vector2d& ref) const;
  /// Inverse map; returns false if x lies outside element e (up to tol).
  bool to_reference(int e, const Eigen::Vector2d& x, Eigen::Vector2d& ref,
                    double tol = 1e-10) const;

  /// Scalar dofs supported on a boundary mesh edge (trace determined by these).
  std::vector<int> edge_scalar_dofs(const MeshBoundaryEdge& edge) const;

  /// The same dofs with their Lagrange-node positions u in [0,1] along the
  /// edge, measured from edge.a to edge.b.
  std::vector<std::pair<int, double>> edge_trace_dofs(const MeshBoundaryEdge& edge) const;

  /// Owner-element reference coordinates of the point at u along the edge.
  Eigen::Vector2d edge_ref_point(const MeshBoundaryEdge& edge, double u) const;

  /// Scalar dofs lying on boundary parts with any of the given tags.
  std::vector<int> boundary_scalar_dofs(const BoundaryPartition& partition,
                                        std::initializer_list<BoundaryTag> tags) const;
  /// All boundary scalar dofs, ordered by first appearance along the boundary.
  std::vector<int> boundary_scalar_dofs(const BoundaryPartition& partition) const;

 private:
  const Mesh* mesh_;
  ReferenceElement ref_;
  int components_;
  int num_scalar_dofs_ = 0;
  std::vector<std::vector<int>> elem_dofs_;
  std::vector<Eigen::Vector2d> dof_coords_;
};

/// View of a coefficient vector as a finite element function.
class FeFunction {
 public:
  FeFunction(const FeSpace& space, const Eigen::VectorXd& coeffs);

  double value(int e, const Eigen::Vector2d& ref) const;
  Eigen::Vector2d gradient(int e, const Eigen::Vector2d& ref) const;

  Eigen::Vector2d value2(int e, const Eigen::Vector2d& ref) const;
  /// Component gradients of a vector field: row i is grad of component i.
  Eigen::Matrix2d jacobian2(int e, const Eigen::Vector2d& ref) const;
  Eigen::Matrix2d sym_curl(int e, const Eigen::Vector2d& ref) const;

 private:
  const FeSpace* space_;
  const Eigen::VectorXd* coeffs_;
};

/// symCurl of a vector field at a physical point inside `element`.
/// Throws PointOutsideElement when the point is not in the element.
Eigen::Matrix2d eval_symcurl(const FeSpace& space, const Eigen::VectorXd& coeffs,
                             int element, const Eigen::Vector2d& x);

/// Matrix form of Curl for component gradients g (rows grad psi_i):
/// Curl psi = [d2 psi_i, -d1 psi_i].
Eigen::Matrix2d curl_from_jacobian(const Eigen::Matrix2d& jac);
Eigen::Matrix2d symcurl_from_jacobian(const Eigen::Matrix2d& jac);

/// Coefficients of the nodal interpolant of an RT0 field a*x + b.
Eigen::VectorXd rt0_interpolant(const FeSpace& vec_space, double a, const Eigen::Vector2d& b);

}  // namespace plate

#endif
