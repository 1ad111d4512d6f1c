// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_BOUNDARY_HPP
#define PLATE_BOUNDARY_HPP

#include <string>
#include <vector>

#include "plate/linalg.hpp"
#include "plate/material.hpp"
#include "plate/space.hpp"

namespace plate {

/// Edge quadrature laid out along the boundary in arclength order. Vector
/// values at the points are stored interleaved: entries (2q, 2q+1).
class BoundaryGeometry {
 public:
  struct Point {
    double sigma, weight, u;  ///< arclength, ds-weight, coordinate on its edge
    Eigen::Vector2d x, normal, tangent;
    BoundaryTag tag;
    int mesh_edge, domain_edge;
    double h_e;
  };

  BoundaryGeometry(const Mesh& mesh, const BoundaryPartition& partition, int points_per_edge);

  const BoundaryPartition& partition() const { return *partition_; }
  int points_per_edge() const { return per_edge_; }
  int num_points() const { return static_cast<int>(points_.size()); }
  const std::vector<Point>& points() const { return points_; }
  int offset(int mesh_edge) const { return mesh_edge * per_edge_; }

 private:
  const BoundaryPartition* partition_;
  int per_edge_;
  std::vector<Point> points_;
};

/// Piecewise polynomial scalar field on the boundary mesh edges, stored as
/// monomial coefficients in the local edge coordinate u in [0,1].
class BoundaryScalarPoly {
 public:
  BoundaryScalarPoly(const BoundaryPartition& partition, int degree);

  int degree() const { return static_cast<int>(coeffs_.cols()) - 1; }
  double value(int mesh_edge, double u) const;
  Eigen::MatrixXd& coeffs() { return coeffs_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  const BoundaryPartition& partition() const { return *partition_; }

 private:
  const BoundaryPartition* partition_;
  Eigen::MatrixXd coeffs_;  ///< n_edges x (degree+1)
};

/// Trace of a scalar FE function on the boundary, exact per edge.
BoundaryScalarPoly boundary_trace(const FeSpace& scalar, const Eigen::VectorXd& coeffs,
                                  const BoundaryPartition& partition);

/// R^2-valued piecewise polynomial on the boundary mesh edges.
class BoundaryPolyField {
 public:
  BoundaryPolyField(const BoundaryPartition& partition, int degree);

  int degree() const { return static_cast<int>(coeffs_x_.cols()) - 1; }
  Eigen::Vector2d value(int mesh_edge, double u) const;
  /// Derivative with respect to arclength.
  Eigen::Vector2d tangential_derivative(int mesh_edge, double u) const;
  Eigen::VectorXd sample(const BoundaryGeometry& geometry) const;
  double max_vertex_jump() const;
  bool continuous(double tol = 1e-12) const { return max_vertex_jump() < tol; }

  Eigen::MatrixXd& coeffs_x() { return coeffs_x_; }
  Eigen::MatrixXd& coeffs_y() { return coeffs_y_; }
  const BoundaryPartition& partition() const { return *partition_; }

 private:
  const BoundaryPartition* partition_;
  Eigen::MatrixXd coeffs_x_, coeffs_y_;  ///< n_edges x (degree+1)
};

/// The extension trace psi_Gamma[q]: the running boundary integral of -q n
/// on Gamma \ E, closed linearly across the fixed clamped edge E. Exact
/// piecewise polynomial of degree deg(q)+1 with cumulative offsets.
BoundaryPolyField extension_trace(const BoundaryPartition& partition,
                                  const BoundaryScalarPoly& q_trace);

/// Clement-type boundary projection onto continuous edgewise-P1 fields.
/// Data: per simply supported domain edge the mean normal component, per
/// free component the L2-fit in RT0; compatibility overrides tie c_E to the
/// neighbouring component at simply-supported/free interfaces.
class ClementProjector {
 public:
  explicit ClementProjector(const BoundaryGeometry& geometry);

  int data_size() const { return static_cast<int>(data_from_values_.rows()); }
  const Eigen::MatrixXd& data_matrix() const { return data_from_values_; }
  const Eigen::MatrixXd& interp_matrix() const { return values_from_data_; }
  const Eigen::MatrixXd& corner_matrix() const { return corners_from_data_; }

  Eigen::VectorXd data(const Eigen::VectorXd& qp_values) const;
  Eigen::VectorXd project(const Eigen::VectorXd& qp_values) const;
  Eigen::VectorXd filter(const Eigen::VectorXd& qp_values) const;

  /// Data index of c_E for a simply supported domain edge, -1 otherwise.
  int c_data_index(int domain_edge) const { return c_index_[domain_edge]; }
  /// Data offset of a free component's three RT0 coefficients (b1,b2,a).
  int component_data_offset(int component) const { return comp_offset_[component]; }
  bool c_overridden(int domain_edge) const { return overridden_[domain_edge]; }

 private:
  Eigen::MatrixXd data_from_values_;   ///< n_data x 2n_qp
  Eigen::MatrixXd corners_from_data_;  ///< 2*n_corners x n_data
  Eigen::MatrixXd values_from_data_;   ///< 2n_qp x n_data
  std::vector<int> c_index_;
  std::vector<int> comp_offset_;
  std::vector<char> overridden_;
};

/// Quadrature weight operators for the boundary forms, as sparse
/// block-diagonal matrices on interleaved qp values.
struct BoundaryWeights {
  SpMat consistency;  ///< n n^T on Gamma_s, I on Gamma_f, 0 on Gamma_c
  SpMat penalty_unit; ///< the same blocks scaled by 1/h_e (penalty eta = 1)
  SpMat full;         ///< ds-weighted identity on the whole boundary
};
BoundaryWeights make_boundary_weights(const BoundaryGeometry& geometry);

/// Vector-valued FE traces at the boundary quadrature points: (2n_qp x n_dofs).
SpMat trace_matrix(const FeSpace& vec_space, const BoundaryGeometry& geometry);

/// chi = (C^{-1} symCurl phi) t evaluated from the owning element: (2n_qp x n_dofs).
SpMat chi_matrix(const FeSpace& vec_space, const BoundaryGeometry& geometry,
                 const MaterialTensor& material);

/// Scalar FE trace values at the quadrature points (length n_qp).
Eigen::VectorXd scalar_trace_values(const FeSpace& scalar, const Eigen::VectorXd& coeffs,
                                    const BoundaryGeometry& geometry);

/// Values of (C^{-1} q I) t at the quadrature points from scalar trace values.
Eigen::VectorXd c_flux_values(const BoundaryGeometry& geometry, const MaterialTensor& material,
                              const Eigen::VectorXd& scalar_values);

/// The boundary-dof extension map q -> psi_Gamma[q] materialized densely on
/// the scalar boundary dofs, sampled at the quadrature points.
class ExtensionOperator {
 public:
  ExtensionOperator(const FeSpace& scalar, const BoundaryGeometry& geometry);

  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  const Eigen::MatrixXd& qp_matrix() const { return qp_matrix_; }
  /// psi_Gamma[q] at the quadrature points for a full coefficient vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& scalar_coeffs) const;

 private:
  std::vector<int> boundary_dofs_;
  Eigen::MatrixXd qp_matrix_;  ///< 2n_qp x n_boundary_dofs
};

// Boundary bilinear forms evaluated on sampled fields. The second argument
// of s and c and both arguments of r_h are filtered through (I - Pi_Gamma).
double form_s(const BoundaryWeights& weights, const ClementProjector& clement,
              const Eigen::VectorXd& chi_values, const Eigen::VectorXd& target_values);
double form_c(const BoundaryGeometry& geometry, const BoundaryWeights& weights,
              const ClementProjector& clement, const MaterialTensor& material,
              const Eigen::VectorXd& scalar_trace, const Eigen::VectorXd& target_values);
double form_r(const BoundaryWeights& weights, const ClementProjector& clement,
              const Eigen::VectorXd& a_values, const Eigen::VectorXd& b_values, double eta);

/// Debug CSV: sigma,value_x,value_y at every quadrature point.
void dump_boundary_field(const std::string& path, const BoundaryGeometry& geometry,
                         const Eigen::VectorXd& qp_values);

}  // namespace plate

#endif
