// SPDX-License-Identifier: Apache-2.0

#include "plate/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace plate {

MomentField::MomentField(const FeSpace& scalar, const FeSpace& vec, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& phi)
    : scalar_(&scalar), vector_(&vec), p_(p), phi_(phi) {
  if (p.size() != scalar.num_dofs() || phi.size() != vec.num_dofs())
    throw ShapeMismatch("MomentField: coefficient sizes do not match the spaces");
}

Eigen::Matrix2d MomentField::value(int element, const Eigen::Vector2d& ref) const {
  const double p = FeFunction(*scalar_, p_).value(element, ref);
  return p * Eigen::Matrix2d::Identity() + FeFunction(*vector_, phi_).sym_curl(element, ref);
}

Eigen::Matrix2d MomentField::value_at(const Eigen::Vector2d& x) const {
  const auto [element, ref] = scalar_->mesh().locate(x);
  return value(element, ref);
}

MomentField reconstruct_moments(const FeSpace& scalar, const FeSpace& vec,
                                const Eigen::VectorXd& p, const Eigen::VectorXd& phi) {
  return MomentField(scalar, vec, p, phi);
}

Eigen::VectorXd PlateSolver::LowRank::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = sparse * x;
  if (u.cols() > 0) {
    const Eigen::VectorXd tu = u.transpose() * x;
    const Eigen::VectorXd tv = v.transpose() * x;
    out += u * (k * tu - tv) - v * tu;
  }
  return out;
}

Eigen::MatrixXd PlateSolver::LowRank::border_block() const {
  Eigen::MatrixXd b(sparse.rows(), 2 * u.cols());
  b << u, v;
  return b;
}

Eigen::MatrixXd PlateSolver::LowRank::corner_block() const {
  const int m = static_cast<int>(u.cols());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  s.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  s.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  s.bottomRightCorner(m, m) = k;
  return s;
}

PlateSolver::PlateSolver(const Mesh& mesh, const BoundaryPartition& partition, int degree,
                         double eta, const MaterialTensor& material)
    : mesh_(&mesh),
      partition_(&partition),
      material_(material),
      eta_(eta),
      scalar_(mesh, degree, 1),
      vector_(mesh, degree, 2),
      geometry_(mesh, partition, degree + 2),
      clement_(geometry_),
      weights_(make_boundary_weights(geometry_)),
      extension_(scalar_, geometry_) {
  if (eta < 0) throw NonpositivePenalty("PlateSolver: penalty parameter must be >= 0");

  dirichlet_ = scalar_.boundary_scalar_dofs(
      partition, {BoundaryTag::Clamped, BoundaryTag::SimplySupported});

  const SpMat stiffness =
      assemble(scalar_, scalar_, VolumeForm::GradGrad, material_).to_column_major();
  stiffness_bc_ = CsrMatrix(apply_dirichlet(stiffness, dirichlet_));
  scalar_solver_ = std::make_unique<SpdSolver>(stiffness_bc_);

  mass_ = assemble(scalar_, scalar_, VolumeForm::Mass, material_).to_column_major();
  coupling_ = assemble(vector_, scalar_, VolumeForm::TraceCoupling, material_).to_column_major();
  vol_ = assemble(vector_, vector_, VolumeForm::SymCurlSymCurl, material_).to_column_major();

  trace_ = trace_matrix(vector_, geometry_);
  chi_ = chi_matrix(vector_, geometry_, material_);
  rt0_ = rt0_moments(vector_);
  rt0_basis_.resize(vector_.num_dofs(), 3);
  rt0_basis_.col(0) = rt0_interpolant(vector_, 0.0, {1, 0});
  rt0_basis_.col(1) = rt0_interpolant(vector_, 0.0, {0, 1});
  rt0_basis_.col(2) = rt0_interpolant(vector_, 1.0, {0, 0});
  rt0_gram_inv_ = Eigen::Matrix3d(rt0_.transpose() * rt0_basis_).inverse();
  // The factorizations pin RT0 with three point constraints (sparse border
  // columns; the L2 moment columns are dense and would ruin the ordering).
  // Solutions are projected back to the moment-orthogonal representative,
  // which solves the same equations since the matrix annihilates RT0.
  pins_ = Eigen::MatrixXd::Zero(vector_.num_dofs(), 3);
  {
    int far = 0;
    for (int i = 0; i < scalar_.num_scalar_dofs(); ++i)
      if (std::abs(scalar_.dof_coord(i).x() - scalar_.dof_coord(0).x()) >
          std::abs(scalar_.dof_coord(far).x() - scalar_.dof_coord(0).x()))
        far = i;
    pins_(0, 0) = 1.0;
    pins_(1, 1) = 1.0;
    pins_(2 * far, 2) = 1.0;
  }
  ext_data_ = clement_.data_matrix() * extension_.qp_matrix();

  // phi-system matrix: volume + consistency + symmetry + penalty. The
  // filter's nonlocal projection enters as a symmetric low-rank correction
  // handled through border columns of the saddle factorization.
  const Eigen::MatrixXd data_t = clement_.data_matrix() * trace_;  // n_data x n
  const Eigen::MatrixXd h_s = clement_.interp_matrix().transpose() * (weights_.consistency * chi_);
  const Eigen::MatrixXd h_r = clement_.interp_matrix().transpose() * (weights_.penalty_unit * trace_);
  const Eigen::MatrixXd k_r = clement_.interp_matrix().transpose() *
                              (weights_.penalty_unit * clement_.interp_matrix());

  const SpMat ws_x = weights_.consistency * chi_;
  const SpMat tws_x = SpMat(trace_.transpose()) * ws_x;
  const SpMat wr_t = weights_.penalty_unit * trace_;
  phi_matrix_.sparse = vol_ + tws_x + SpMat(tws_x.transpose()) + eta_ * (SpMat(trace_.transpose()) * wr_t);
  phi_matrix_.u = data_t.transpose();
  phi_matrix_.v = (h_s + eta_ * h_r).transpose();
  phi_matrix_.k = eta_ * k_r;

  norm_matrix_.sparse = vol_ + SpMat(trace_.transpose()) * wr_t;
  norm_matrix_.u = data_t.transpose();
  norm_matrix_.v = h_r.transpose();
  norm_matrix_.k = k_r;

  phi_solver_ = make_bordered(phi_matrix_);
}

std::unique_ptr<BorderedSolver> PlateSolver::make_bordered(const LowRank& m) const {
  const int mm = 2 * static_cast<int>(m.u.cols());
  Eigen::MatrixXd c(vector_.num_dofs(), mm + 3);
  if (mm > 0) c.leftCols(mm) = m.border_block();
  c.rightCols(3) = pins_;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(mm + 3, mm + 3);
  if (mm > 0) s.topLeftCorner(mm, mm) = m.corner_block();
  return std::make_unique<BorderedSolver>(m.sparse, c, s);
}

const BorderedSolver& PlateSolver::norm_solver() const {
  if (!norm_solver_) norm_solver_ = make_bordered(norm_matrix_);
  return *norm_solver_;
}

Eigen::VectorXd PlateSolver::project_rt0(Eigen::VectorXd x) const {
  const Eigen::Vector3d coef = rt0_gram_inv_ * (rt0_.transpose() * x);
  x.noalias() -= rt0_basis_ * coef;
  return x;
}

Eigen::VectorXd PlateSolver::solve_p(const LoadFn& f) const {
  Eigen::VectorXd rhs = assemble_load(scalar_, f);
  apply_dirichlet_rhs(rhs, dirichlet_);
  Eigen::VectorXd p = scalar_solver_->solve(rhs);
  const double scale = std::max(rhs.norm(), 1e-300);
  if (!((stiffness_bc_.multiply(p) - rhs).norm() / scale < 1e-10))
    throw NotPositiveDefinite("solve_p: residual above tolerance");
  return p;
}

Eigen::VectorXd PlateSolver::solve_phi(const Eigen::VectorXd& p) const {
  if (p.size() != scalar_.num_dofs()) throw ShapeMismatch("solve_phi: bad p length");

  const Eigen::VectorXd trace_p = scalar_trace_values(scalar_, p, geometry_);
  const Eigen::VectorXd ext_p =
      extension_trace(*partition_, boundary_trace(scalar_, p, *partition_)).sample(geometry_);
  const Eigen::VectorXd filt_ext_p = clement_.filter(ext_p);
  const Eigen::VectorXd c_flux = c_flux_values(geometry_, material_, trace_p);

  Eigen::VectorXd rhs = -(coupling_ * p);
  {
    // -c(p, psi)
    const Eigen::VectorXd wc = weights_.full * c_flux;
    rhs -= trace_.transpose() * wc;
    rhs += phi_matrix_.u * (clement_.interp_matrix().transpose() * wc);
  }
  // + s(psi, psi_Gamma[p])
  rhs += chi_.transpose() * (weights_.consistency * filt_ext_p);
  if (eta_ > 0) {
    // + r_h(psi_Gamma[p], psi)
    const Eigen::VectorXd wr = weights_.penalty_unit * filt_ext_p;
    rhs += eta_ * (trace_.transpose() * wr);
    rhs -= eta_ * (phi_matrix_.u * (clement_.interp_matrix().transpose() * wr));
  }

  const BorderedSolution sol = phi_solver_->solve(rhs);
  const Eigen::VectorXd phi = project_rt0(sol.x);

  // The pin multipliers vanish for a consistent rhs, so the projected
  // representative solves the unmodified system.
  const double scale = std::max({rhs.norm(), phi.norm(), 1.0});
  if (!((apply_phi_matrix(phi) - rhs).norm() / scale < 1e-9))
    throw SingularSaddle("solve_phi: system residual above tolerance");
  const Eigen::Vector3d constraint = rt0_.transpose() * phi;
  for (int j = 0; j < 3; ++j)
    if (!(std::abs(constraint[j]) / std::max(1.0, rt0_.col(j).norm() * phi.norm()) < 1e-9))
      throw SingularSaddle("solve_phi: RT0 constraint residual above tolerance");

  const CoercivityReport probe = coercivity_estimate(64);
  if (probe.estimate <= 0)
    throw NotCoercive("solve_phi: phi-form is not coercive (estimate " +
                      std::to_string(probe.estimate) + "); increase eta");
  return phi;
}

Eigen::VectorXd PlateSolver::w_rhs_boundary(const Eigen::VectorXd& p,
                                            const Eigen::VectorXd& phi) const {
  const Eigen::VectorXd trace_p = scalar_trace_values(scalar_, p, geometry_);
  const Eigen::VectorXd ext_p =
      extension_trace(*partition_, boundary_trace(scalar_, p, *partition_)).sample(geometry_);

  Eigen::VectorXd vstar = weights_.consistency * (chi_ * phi) +
                          weights_.full * c_flux_values(geometry_, material_, trace_p);
  if (eta_ > 0)
    vstar += eta_ * (weights_.penalty_unit * clement_.filter(trace_ * phi - ext_p));

  // -(Filt E)' vstar, scattered to the global scalar dofs.
  const Eigen::VectorXd b =
      extension_.qp_matrix().transpose() * vstar -
      ext_data_.transpose() * (clement_.interp_matrix().transpose() * vstar);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(scalar_.num_dofs());
  const auto& bdofs = extension_.boundary_dofs();
  for (int j = 0; j < static_cast<int>(bdofs.size()); ++j) rhs[bdofs[j]] = -b[j];
  return rhs;
}

Eigen::VectorXd PlateSolver::solve_w(const Eigen::VectorXd& p, const Eigen::VectorXd& phi) const {
  if (p.size() != scalar_.num_dofs() || phi.size() != vector_.num_dofs())
    throw ShapeMismatch("solve_w: bad coefficient lengths");
  // (M_h, q I)_{C^{-1}} = 2/(D(1+nu)) (p, q) + (tr C^{-1} symCurl phi, q)
  Eigen::VectorXd rhs = 2.0 * material_.inverse_identity_scale() * (mass_ * p) +
                        coupling_.transpose() * phi;
  rhs += w_rhs_boundary(p, phi);
  apply_dirichlet_rhs(rhs, dirichlet_);
  Eigen::VectorXd w = scalar_solver_->solve(rhs);
  const double scale = std::max(rhs.norm(), 1e-300);
  if (!((stiffness_bc_.multiply(w) - rhs).norm() / scale < 1e-10))
    throw NotPositiveDefinite("solve_w: residual above tolerance");
  return w;
}

PlateSolution PlateSolver::solve(const LoadFn& f) const {
  PlateSolution out;
  out.eta = eta_;
  out.material = material_;
  out.p = solve_p(f);
  out.phi = solve_phi(out.p);
  out.w = solve_w(out.p, out.phi);
  return out;
}

MomentField PlateSolver::moments(const PlateSolution& solution) const {
  return MomentField(scalar_, vector_, solution.p, solution.phi);
}

Eigen::VectorXd PlateSolver::apply_phi_matrix(const Eigen::VectorXd& x) const {
  return phi_matrix_.apply(x);
}

Eigen::VectorXd PlateSolver::apply_norm_matrix(const Eigen::VectorXd& x) const {
  return norm_matrix_.apply(x);
}

Eigen::Vector3d PlateSolver::rt0_residuals(const Eigen::VectorXd& phi) const {
  return rt0_.transpose() * phi;
}

CoercivityReport PlateSolver::coercivity_estimate(int max_iterations) const {
  // Lanczos for the pencil (A_phi, N) restricted to the RT0 quotient, run
  // in the N inner product via bordered solves of N. The smallest Ritz
  // value is a Rayleigh quotient, so a nonpositive estimate certifies
  // indefiniteness.
  const BorderedSolver& nsolve = norm_solver();
  const int n = vector_.num_dofs();
  const int m = std::min(max_iterations, std::max(2, n - 4));

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd seed(n);
  for (int i = 0; i < n; ++i) seed[i] = gauss(rng);

  std::vector<Eigen::VectorXd> basis, nbasis;  // v_j and N v_j
  std::vector<double> alpha, beta;
  {
    Eigen::VectorXd v = project_rt0(nsolve.solve(norm_matrix_.apply(seed)).x);
    Eigen::VectorXd nv = norm_matrix_.apply(v);
    const double nn = std::sqrt(v.dot(nv));
    if (!(nn > 0)) return {0.0, false, 0};
    basis.push_back(v / nn);
    nbasis.push_back(nv / nn);
  }

  CoercivityReport report;
  double beta_scale = 0;
  double prev_estimate = std::numeric_limits<double>::quiet_NaN();
  int stagnant = 0;
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd av = phi_matrix_.apply(basis[j]);
    Eigen::VectorXd w = nsolve.solve(av).x;
    alpha.push_back(av.dot(basis[j]));
    // full reorthogonalization in the N inner product
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < static_cast<int>(basis.size()); ++i)
        w -= w.dot(nbasis[i]) * basis[i];
    // Re-project onto the quotient after the subtractions: RT0 noise has
    // zero N-norm and would otherwise cascade through the normalization.
    w = project_rt0(std::move(w));
    Eigen::VectorXd nw = norm_matrix_.apply(w);
    const double nb = std::sqrt(std::max(0.0, w.dot(nw)));
    beta_scale = std::max(beta_scale, nb);
    report.iterations = j + 1;

    const int kdim = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(kdim, kdim);
    for (int i = 0; i < kdim; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < kdim) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    int imin = 0;
    es.eigenvalues().minCoeff(&imin);
    report.estimate = es.eigenvalues()(imin);
    // Krylov exhaustion: the Ritz values are exact on the invariant subspace.
    if (nb <= 1e-12 * std::max(1.0, beta_scale)) {
      report.converged = true;
      return report;
    }
    // Lanczos residual bound |lambda - theta| <= beta |s_last|, plus a
    // stagnation test for clustered bottom eigenvalues.
    const double scale = std::max(1.0, std::abs(report.estimate));
    const double bound = nb * std::abs(es.eigenvectors()(kdim - 1, imin));
    if (bound < 1e-7 * scale) {
      report.converged = true;
      return report;
    }
    stagnant = std::abs(report.estimate - prev_estimate) < 1e-9 * scale ? stagnant + 1 : 0;
    prev_estimate = report.estimate;
    if (stagnant >= 4) {
      report.converged = true;
      return report;
    }
    beta.push_back(nb);
    if (j + 1 < m) {
      basis.push_back(w / nb);
      nbasis.push_back(nw / nb);
    }
  }
  return report;
}

double PlateSolver::moment_nn_boundary_norm(const PlateSolution& solution) const {
  const MomentField m = moments(solution);
  double acc = 0;
  for (const auto& p : geometry_.points()) {
    if (p.tag == BoundaryTag::Clamped) continue;
    const auto& edge = partition_->edges[p.mesh_edge];
    const Eigen::Matrix2d mm = m.value(edge.element, scalar_.edge_ref_point(edge, p.u));
    const double mnn = p.normal.dot(mm * p.normal);
    acc += p.weight * mnn * mnn;
  }
  return std::sqrt(acc);
}

double PlateSolver::coupling_residual(const Eigen::VectorXd& scalar_coeffs) const {
  const BoundaryScalarPoly trace = boundary_trace(scalar_, scalar_coeffs, *partition_);
  const BoundaryPolyField psi = extension_trace(*partition_, trace);
  double mx = 0;
  for (const auto& p : geometry_.points()) {
    if (partition_->on_fixed_edge(p.mesh_edge)) continue;
    const Eigen::Vector2d r = psi.tangential_derivative(p.mesh_edge, p.u) +
                              trace.value(p.mesh_edge, p.u) * p.normal;
    mx = std::max(mx, r.norm());
  }
  return mx;
}

void PlateSolver::dump_systems(const std::string& prefix) const {
  write_matrix_market(prefix + "_stiffness.mtx", stiffness_bc_);
  write_matrix_market(prefix + "_phi_sparse.mtx", CsrMatrix(phi_matrix_.sparse));
  write_matrix_market(prefix + "_symcurl.mtx", CsrMatrix(vol_));
}

void write_solution_csv(const std::string& path, const PlateSolver& solver,
                        const PlateSolution& solution) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write solution file: " + path);
  const Mesh& mesh = solver.mesh();
  const Eigen::Vector2d centroid = mesh.kind == CellKind::Triangle
                                       ? Eigen::Vector2d(1.0 / 3.0, 1.0 / 3.0)
                                       : Eigen::Vector2d(0.5, 0.5);
  const MomentField m = solver.moments(solution);
  const FeFunction wf(solver.scalar_space(), solution.w);
  const FeFunction pf(solver.scalar_space(), solution.p);
  out << "x,y,w,p,M11,M12,M22\n";
  char line[256];
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Eigen::Vector2d x = solver.scalar_space().to_physical(e, centroid);
    const Eigen::Matrix2d mm = m.value(e, centroid);
    std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", x.x(), x.y(),
                  wf.value(e, centroid), pf.value(e, centroid), mm(0, 0), mm(0, 1), mm(1, 1));
    out << line;
  }
  if (!out) throw IoError("failed writing solution file: " + path);
}

}  // namespace plate
