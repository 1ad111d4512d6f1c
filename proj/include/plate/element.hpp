// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_ELEMENT_HPP
#define PLATE_ELEMENT_HPP

#include <vector>

#include <Eigen/Dense>

#include "plate/geometry.hpp"

namespace plate {

/// Nodal Lagrange basis on the reference cell. Triangles support degrees
/// 1..3, quads the bilinear case only. Local node order: vertices, then
/// edge nodes (per local edge, along its direction), then interior nodes.
class ReferenceElement {
 public:
  ReferenceElement(CellKind kind, int degree);

  CellKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(nodes_.size()); }
  int num_vertices() const { return kind_ == CellKind::Triangle ? 3 : 4; }
  int nodes_per_edge() const { return degree_ - 1; }
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

  /// Local (tail, head) vertex indices of local edge `e`.
  std::pair<int, int> edge_vertices(int e) const;

  Eigen::VectorXd values(const Eigen::Vector2d& ref) const;
  /// Gradients with respect to reference coordinates, one row per basis function.
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients(const Eigen::Vector2d& ref) const;

 private:
  CellKind kind_;
  int degree_;
  std::vector<Eigen::Vector2d> nodes_;
  Eigen::MatrixXd coeff_;  ///< monomial coefficients, one column per basis function
  Eigen::MatrixXi powers_; ///< monomial exponents (m x 2)

  Eigen::VectorXd monomials(const Eigen::Vector2d& ref) const;
};

}  // namespace plate

#endif
