// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_LINALG_HPP
#define PLATE_LINALG_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "plate/errors.hpp"

namespace plate {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Compressed sparse row matrix; wraps a row-major Eigen sparse matrix so
/// the CSR arrays are directly accessible.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  explicit CsrMatrix(const SpMat& m) : m_(m) { m_.makeCompressed(); }

  static CsrMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets);

  int rows() const { return static_cast<int>(m_.rows()); }
  int cols() const { return static_cast<int>(m_.cols()); }
  int nonzeros() const { return static_cast<int>(m_.nonZeros()); }

  const int* row_offsets() const { return m_.outerIndexPtr(); }
  const int* col_indices() const { return m_.innerIndexPtr(); }
  const double* values() const { return m_.valuePtr(); }

  SpMat to_column_major() const { return SpMat(m_); }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& eigen() const { return m_; }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const { return m_ * x; }
  double max_asymmetry() const;

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> m_;
};

/// Sparse LDLT solver for symmetric positive definite systems.
/// Construction throws NotPositiveDefinite on a nonpositive pivot.
class SpdSolver {
 public:
  explicit SpdSolver(const CsrMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  int size() const { return n_; }

 private:
  int n_;
  SpMat a_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

/// One-shot SPD solve with a relative residual check (< 1e-10).
Eigen::VectorXd solve_spd(const CsrMatrix& a, const Eigen::VectorXd& b);

/// Symmetric bordered system
///   [A  C] [x]   [rhs ]
///   [C' S] [y] = [rhs2]
/// with a sparse symmetric A, a thin dense border C and a small symmetric
/// corner block S (zero for pure constraints).
struct BorderedSystem {
  CsrMatrix a;
  Eigen::MatrixXd border;   ///< n x m
  Eigen::MatrixXd corner;   ///< m x m, zero if empty
  Eigen::VectorXd rhs;      ///< length n
  Eigen::VectorXd rhs2;     ///< length m, zero if empty
};

struct BorderedSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
};

/// Reusable LU factorization of the bordered matrix.
class BorderedSolver {
 public:
  BorderedSolver(const SpMat& a, const Eigen::MatrixXd& border, const Eigen::MatrixXd& corner);
  BorderedSolution solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& rhs2 = {}) const;
  int size() const { return n_; }
  int border_size() const { return m_; }

 private:
  int n_, m_;
  SpMat a_;
  Eigen::MatrixXd border_, corner_;
  Eigen::SparseLU<SpMat> lu_;
};

/// One-shot bordered solve; checks both block residuals (< 1e-9 relative).
BorderedSolution solve_bordered(const BorderedSystem& system);

/// Homogeneous Dirichlet rows/columns: zero them and put 1 on the diagonal,
/// preserving symmetry; rhs entries are zeroed by apply_dirichlet_rhs.
SpMat apply_dirichlet(const SpMat& a, const std::vector<int>& dofs);
void apply_dirichlet_rhs(Eigen::VectorXd& b, const std::vector<int>& dofs);

void write_matrix_market(const std::string& path, const CsrMatrix& a);

}  // namespace plate

#endif
