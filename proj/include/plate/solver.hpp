// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_SOLVER_HPP
#define PLATE_SOLVER_HPP

#include <functional>
#include <memory>
#include <string>

#include "plate/assembly.hpp"
#include "plate/boundary.hpp"

namespace plate {

struct PlateSolution {
  Eigen::VectorXd p, phi, w;
  double eta = 0;
  MaterialTensor material = MaterialTensor::identity();
};

/// Bending moment evaluator M_h = p_h I + symCurl phi_h.
class MomentField {
 public:
  MomentField(const FeSpace& scalar, const FeSpace& vec, const Eigen::VectorXd& p,
              const Eigen::VectorXd& phi);
  Eigen::Matrix2d value(int element, const Eigen::Vector2d& ref) const;
  /// Physical-point evaluation on native square meshes.
  Eigen::Matrix2d value_at(const Eigen::Vector2d& x) const;

 private:
  const FeSpace* scalar_;
  const FeSpace* vector_;
  Eigen::VectorXd p_, phi_;
};

MomentField reconstruct_moments(const FeSpace& scalar, const FeSpace& vec,
                                const Eigen::VectorXd& p, const Eigen::VectorXd& phi);

struct CoercivityReport {
  double estimate = 0;   ///< smallest Rayleigh quotient of the phi-form
  bool converged = false;
  int iterations = 0;
};

/// Three consecutive second-order solves: the Poisson p-problem, the
/// Nitsche phi-problem on the RT0 quotient, and the Poisson w-problem.
class PlateSolver {
 public:
  using LoadFn = std::function<double(const Eigen::Vector2d&)>;

  PlateSolver(const Mesh& mesh, const BoundaryPartition& partition, int degree, double eta,
              const MaterialTensor& material);

  const Mesh& mesh() const { return *mesh_; }
  const BoundaryPartition& partition() const { return *partition_; }
  const FeSpace& scalar_space() const { return scalar_; }
  const FeSpace& vector_space() const { return vector_; }
  const BoundaryGeometry& boundary() const { return geometry_; }
  const ClementProjector& clement() const { return clement_; }
  const BoundaryWeights& weights() const { return weights_; }
  const ExtensionOperator& extension() const { return extension_; }
  double eta() const { return eta_; }
  const MaterialTensor& material() const { return material_; }
  const std::vector<int>& dirichlet_dofs() const { return dirichlet_; }

  Eigen::VectorXd solve_p(const LoadFn& f) const;
  /// Throws NotCoercive when the coercivity probe finds a nonpositive
  /// Rayleigh quotient on the constrained space.
  Eigen::VectorXd solve_phi(const Eigen::VectorXd& p) const;
  Eigen::VectorXd solve_w(const Eigen::VectorXd& p, const Eigen::VectorXd& phi) const;
  PlateSolution solve(const LoadFn& f) const;

  MomentField moments(const PlateSolution& solution) const;

  /// Smallest Rayleigh quotient a_phi(psi,psi)/|psi|_h^2 over the RT0
  /// quotient, estimated by a Lanczos iteration driven by bordered solves
  /// of the norm matrix.
  CoercivityReport coercivity_estimate(int max_iterations = 160) const;

  /// || (M_h)_nn ||_{0, Gamma_s u Gamma_f} for the weak-bc diagnostic.
  double moment_nn_boundary_norm(const PlateSolution& solution) const;

  /// Largest coupling-condition residual |d psi_Gamma[q]/dt + q n| over the
  /// boundary quadrature points of Gamma \ E.
  double coupling_residual(const Eigen::VectorXd& scalar_coeffs) const;

  /// The psi_Gamma-dependent boundary contribution to the w-problem rhs.
  Eigen::VectorXd w_rhs_boundary(const Eigen::VectorXd& p, const Eigen::VectorXd& phi) const;

  /// Action of the assembled phi-system matrix (for diagnostics/tests).
  Eigen::VectorXd apply_phi_matrix(const Eigen::VectorXd& x) const;

  /// Action of the mesh-norm matrix: |psi|_h^2 = psi' N psi.
  Eigen::VectorXd apply_norm_matrix(const Eigen::VectorXd& x) const;

  /// L2 moments of phi against the three RT0 fields.
  Eigen::Vector3d rt0_residuals(const Eigen::VectorXd& phi) const;

  /// Matrix-market dumps of the assembled systems (debug aid).
  void dump_systems(const std::string& prefix) const;

 private:
  struct LowRank {
    // sparse + u k u' - u v' - v u'
    SpMat sparse;
    Eigen::MatrixXd u, v, k;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd border_block() const;  ///< [u v]
    Eigen::MatrixXd corner_block() const;  ///< [[0, I], [I, k]]
  };

  std::unique_ptr<BorderedSolver> make_bordered(const LowRank& m) const;
  const BorderedSolver& norm_solver() const;
  /// Remove the interpolated-RT0 component (L2-orthogonal representative).
  Eigen::VectorXd project_rt0(Eigen::VectorXd x) const;

  const Mesh* mesh_;
  const BoundaryPartition* partition_;
  MaterialTensor material_;
  double eta_;
  FeSpace scalar_, vector_;
  BoundaryGeometry geometry_;
  ClementProjector clement_;
  BoundaryWeights weights_;
  ExtensionOperator extension_;

  std::vector<int> dirichlet_;
  CsrMatrix stiffness_bc_;
  std::unique_ptr<SpdSolver> scalar_solver_;
  SpMat mass_, coupling_, vol_;
  SpMat trace_, chi_;
  Eigen::MatrixXd rt0_;        ///< L2 moments against RT0 (n x 3)
  Eigen::MatrixXd rt0_basis_;  ///< interpolated RT0 fields (n x 3)
  Eigen::Matrix3d rt0_gram_inv_;
  Eigen::MatrixXd pins_;       ///< sparse point constraints pinning RT0
  Eigen::MatrixXd ext_data_;   ///< clement data of the extension columns

  LowRank phi_matrix_, norm_matrix_;
  std::unique_ptr<BorderedSolver> phi_solver_;
  mutable std::unique_ptr<BorderedSolver> norm_solver_;
};

/// Solution export: one row per element, sampled at the centroid.
void write_solution_csv(const std::string& path, const PlateSolver& solver,
                        const PlateSolution& solution);

}  // namespace plate

#endif
