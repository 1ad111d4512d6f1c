// SPDX-License-Identifier: Apache-2.0

#include "plate/linalg.hpp"

#include <fstream>

namespace plate {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return CsrMatrix(SpMat(m));
}

double CsrMatrix::max_asymmetry() const {
  if (rows() != cols()) return std::numeric_limits<double>::infinity();
  const SpMat a = to_column_major();
  const SpMat diff = a - SpMat(a.transpose());
  double mx = 0;
  for (int k = 0; k < diff.nonZeros(); ++k) mx = std::max(mx, std::abs(diff.valuePtr()[k]));
  return mx;
}

SpdSolver::SpdSolver(const CsrMatrix& a) : n_(a.rows()), a_(a.to_column_major()) {
  ldlt_.compute(a_);
  if (ldlt_.info() != Eigen::Success)
    throw NotPositiveDefinite("sparse LDLT factorization failed");
  if ((ldlt_.vectorD().array() <= 0.0).any())
    throw NotPositiveDefinite("matrix has a nonpositive pivot");
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw ShapeMismatch("SpdSolver::solve: size mismatch");
  return ldlt_.solve(b);
}

Eigen::VectorXd solve_spd(const CsrMatrix& a, const Eigen::VectorXd& b) {
  SpdSolver solver(a);
  Eigen::VectorXd x = solver.solve(b);
  const double bnorm = b.norm();
  const double resid = (a.multiply(x) - b).norm();
  if (bnorm > 0 && !(resid / bnorm < 1e-10))
    throw NotPositiveDefinite("solve_spd: residual above tolerance");
  return x;
}

BorderedSolver::BorderedSolver(const SpMat& a, const Eigen::MatrixXd& border,
                               const Eigen::MatrixXd& corner)
    : n_(static_cast<int>(a.rows())),
      m_(static_cast<int>(border.cols())),
      a_(a),
      border_(border),
      corner_(corner) {
  if (border_.rows() != n_) throw ShapeMismatch("BorderedSolver: border rows != n");
  if (corner_.size() == 0) corner_ = Eigen::MatrixXd::Zero(m_, m_);
  if (corner_.rows() != m_ || corner_.cols() != m_)
    throw ShapeMismatch("BorderedSolver: corner block must be m x m");

  std::vector<Triplet> trip;
  trip.reserve(a_.nonZeros() + 2 * n_ * m_ + m_ * m_);
  for (int k = 0; k < a_.outerSize(); ++k)
    for (SpMat::InnerIterator it(a_, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int j = 0; j < m_; ++j)
    for (int i = 0; i < n_; ++i) {
      const double v = border_(i, j);
      if (v != 0.0) {
        trip.emplace_back(i, n_ + j, v);
        trip.emplace_back(n_ + j, i, v);
      }
    }
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      if (corner_(i, j) != 0.0) trip.emplace_back(n_ + i, n_ + j, corner_(i, j));

  SpMat full(n_ + m_, n_ + m_);
  full.setFromTriplets(trip.begin(), trip.end());
  full.makeCompressed();
  lu_.compute(full);
  if (lu_.info() != Eigen::Success)
    throw SingularSaddle("bordered factorization broke down");
}

BorderedSolution BorderedSolver::solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& rhs2) const {
  if (rhs.size() != n_) throw ShapeMismatch("BorderedSolver::solve: rhs length mismatch");
  Eigen::VectorXd full(n_ + m_);
  full.head(n_) = rhs;
  full.tail(m_) = rhs2.size() == 0 ? Eigen::VectorXd::Zero(m_) : rhs2;
  const Eigen::VectorXd sol = lu_.solve(full);
  if (lu_.info() != Eigen::Success) throw SingularSaddle("bordered solve failed");
  return {sol.head(n_), sol.tail(m_)};
}

BorderedSolution solve_bordered(const BorderedSystem& system) {
  BorderedSolver solver(system.a.to_column_major(), system.border, system.corner);
  BorderedSolution sol = solver.solve(system.rhs, system.rhs2);

  const int m = static_cast<int>(system.border.cols());
  const Eigen::VectorXd rhs2 =
      system.rhs2.size() == 0 ? Eigen::VectorXd::Zero(m) : system.rhs2;
  const Eigen::MatrixXd corner =
      system.corner.size() == 0 ? Eigen::MatrixXd::Zero(m, m) : system.corner;
  const Eigen::VectorXd r1 =
      system.a.multiply(sol.x) + system.border * sol.multipliers - system.rhs;
  const Eigen::VectorXd r2 =
      system.border.transpose() * sol.x + corner * sol.multipliers - rhs2;
  const double scale = std::max({system.rhs.norm(), rhs2.norm(), 1e-300});
  if (!(r1.norm() / scale < 1e-9) || !(r2.norm() / scale < 1e-9))
    throw SingularSaddle("bordered solve residual above tolerance");
  return sol;
}

SpMat apply_dirichlet(const SpMat& a, const std::vector<int>& dofs) {
  std::vector<char> fixed(a.rows(), 0);
  for (int d : dofs) fixed[d] = 1;
  std::vector<Triplet> trip;
  trip.reserve(a.nonZeros());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (fixed[i] || fixed[j]) continue;
      trip.emplace_back(i, j, it.value());
    }
  for (int d : dofs) trip.emplace_back(d, d, 1.0);
  SpMat out(a.rows(), a.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

void apply_dirichlet_rhs(Eigen::VectorXd& b, const std::vector<int>& dofs) {
  for (int d : dofs) b[d] = 0.0;
}

void write_matrix_market(const std::string& path, const CsrMatrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nonzeros() << "\n";
  out.precision(17);
  const auto& m = a.eigen();
  for (int i = 0; i < m.outerSize(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, i); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
  if (!out) throw IoError("failed writing matrix file: " + path);
}

}  // namespace plate
