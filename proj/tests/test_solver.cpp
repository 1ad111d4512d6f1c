// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "plate/solver.hpp"
#include "plate/verification.hpp"

namespace plate {
namespace {

double benchmark_load(const Eigen::Vector2d& x) {
  return 4 * std::pow(M_PI, 4) * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
}

struct SolverFixture {
  Mesh mesh;
  BoundaryPartition partition;
  std::unique_ptr<PlateSolver> solver;

  SolverFixture(int level, int degree, double eta, SideTags tags = SideTags{},
        MaterialTensor material = MaterialTensor::identity())
      : mesh(build_square_mesh(level, CellKind::Triangle)),
        partition(classify_boundary(mesh, tags)) {
    solver = std::make_unique<PlateSolver>(mesh, partition, degree, eta, material);
  }
};

TEST(Pipeline, ZeroLoadGivesZeroSolution) {
  SolverFixture s(3, 1, 10.0);
  const PlateSolution sol = s.solver->solve([](const Eigen::Vector2d&) { return 0.0; });
  EXPECT_NEAR(sol.p.cwiseAbs().maxCoeff(), 0, 1e-12);
  EXPECT_NEAR(sol.phi.cwiseAbs().maxCoeff(), 0, 1e-12);
  EXPECT_NEAR(sol.w.cwiseAbs().maxCoeff(), 0, 1e-12);
}

TEST(Pipeline, GalerkinOrthogonalityOfP) {
  SolverFixture s(3, 2, 40.0);
  const Eigen::VectorXd p = s.solver->solve_p(benchmark_load);
  // residual of the eliminated system against the assembled load
  const FeSpace& scalar = s.solver->scalar_space();
  Eigen::VectorXd rhs = assemble_load(scalar, benchmark_load);
  const SpMat stiff = assemble(scalar, scalar, VolumeForm::GradGrad, s.solver->material())
                          .to_column_major();
  const Eigen::VectorXd resid = stiff * p - rhs;
  std::vector<char> fixed(scalar.num_dofs(), 0);
  for (int d : s.solver->dirichlet_dofs()) fixed[d] = 1;
  double worst = 0;
  for (int i = 0; i < scalar.num_dofs(); ++i)
    if (!fixed[i]) worst = std::max(worst, std::abs(resid[i]));
  EXPECT_LT(worst / rhs.norm(), 1e-10);
}

TEST(Pipeline, DirichletValuesVanish) {
  SolverFixture s(3, 2, 40.0);
  const PlateSolution sol = s.solver->solve(benchmark_load);
  for (int d : s.solver->dirichlet_dofs()) {
    EXPECT_EQ(sol.p[d], 0.0);
    EXPECT_EQ(sol.w[d], 0.0);
  }
}

TEST(PhiProblem, SystemMatrixIsSymmetric) {
  SolverFixture s(2, 2, 40.0);
  const int n = s.solver->vector_space().num_dofs();
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    a.col(j) = s.solver->apply_phi_matrix(Eigen::VectorXd::Unit(n, j));
  EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PhiProblem, RT0OrthogonalityByQuadratureOracle) {
  // Independent oracle: elementwise quadrature of (phi_h, r) for the three
  // RT0 fields, not the solver's own moment matrix.
  SolverFixture s(3, 2, 40.0);
  const Eigen::VectorXd p = s.solver->solve_p(benchmark_load);
  const Eigen::VectorXd phi = s.solver->solve_phi(p);
  const FeSpace& vec = s.solver->vector_space();
  const QuadRule rule = triangle_rule(2 * vec.degree() + 2);
  FeFunction f(vec, phi);
  Eigen::Vector3d moments = Eigen::Vector3d::Zero();
  for (int e = 0; e < s.mesh.num_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d ref = rule.points.row(q).transpose();
      const double wq = rule.weights[q] * vec.jacobian(e, ref).determinant();
      const Eigen::Vector2d x = vec.to_physical(e, ref);
      const Eigen::Vector2d v = f.value2(e, ref);
      moments[0] += wq * v.x();
      moments[1] += wq * v.y();
      moments[2] += wq * v.dot(x);
    }
  EXPECT_LT(moments.cwiseAbs().maxCoeff() / std::max(1.0, phi.norm()), 1e-9);
}

TEST(PhiProblem, ConstraintFixesTheRepresentative) {
  // phi + r solves the same equations for any interpolated RT0 field r, but
  // only the moment-orthogonal representative is returned.
  SolverFixture s(3, 1, 10.0);
  const Eigen::VectorXd p = s.solver->solve_p(benchmark_load);
  const Eigen::VectorXd phi = s.solver->solve_phi(p);
  const Eigen::VectorXd r = rt0_interpolant(s.solver->vector_space(), 0.8, {-0.3, 1.4});
  const Eigen::VectorXd shifted = phi + r;
  // both satisfy the linear system (the matrix annihilates RT0)
  EXPECT_LT((s.solver->apply_phi_matrix(shifted) - s.solver->apply_phi_matrix(phi)).norm(),
            1e-9 * std::max(1.0, phi.norm()));
  // but only the solver output is moment-orthogonal
  EXPECT_LT(s.solver->rt0_residuals(phi).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GT(s.solver->rt0_residuals(shifted).cwiseAbs().maxCoeff(), 1e-3);
  // re-solving returns the same representative
  EXPECT_EQ((s.solver->solve_phi(p) - phi).norm(), 0.0);
}

TEST(PhiProblem, DiscreteVariationalEquationHolds) {
  // Slow-route oracle: for random test functions psi, evaluate both sides of
  // the phi-problem with elementwise quadrature and the value-level boundary
  // forms, independently of the assembled operators.
  SolverFixture s(2, 2, 40.0);
  const PlateSolver& solver = *s.solver;
  const Eigen::VectorXd p = solver.solve_p(benchmark_load);
  const Eigen::VectorXd phi = solver.solve_phi(p);

  const FeSpace& vec = solver.vector_space();
  const FeSpace& scalar = solver.scalar_space();
  const BoundaryGeometry& geometry = solver.boundary();
  const ClementProjector& clement = solver.clement();
  const BoundaryWeights& weights = solver.weights();
  const MaterialTensor& mat = solver.material();
  const double eta = solver.eta();

  const SpMat chi = chi_matrix(vec, geometry, mat);
  const SpMat trace = trace_matrix(vec, geometry);
  const Eigen::VectorXd chi_phi = chi * phi;
  const Eigen::VectorXd trace_phi = trace * phi;
  const Eigen::VectorXd trace_p = scalar_trace_values(scalar, p, geometry);
  const Eigen::VectorXd ext_p =
      extension_trace(solver.partition(), boundary_trace(scalar, p, solver.partition()))
          .sample(geometry);

  const QuadRule rule = triangle_rule(2 * vec.degree());
  std::mt19937 rng(51);
  std::normal_distribution<double> gauss;
  double worst = 0;
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::VectorXd psi(vec.num_dofs());
    for (int i = 0; i < psi.size(); ++i) psi[i] = gauss(rng);

    double volume_a = 0, volume_f = 0;
    FeFunction phif(vec, phi), psif(vec, psi);
    FeFunction pf(scalar, p);
    for (int e = 0; e < s.mesh.num_elements(); ++e)
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::Vector2d ref = rule.points.row(q).transpose();
        const double wq = rule.weights[q] * vec.jacobian(e, ref).determinant();
        const Eigen::Matrix2d sc_psi = psif.sym_curl(e, ref);
        volume_a += wq * mat.apply_inverse(phif.sym_curl(e, ref)).cwiseProduct(sc_psi).sum();
        volume_f -= wq * pf.value(e, ref) * mat.apply_inverse(sc_psi).trace() *
                    1.0;  // (p I, symCurl psi)_{C^-1} = p tr(C^-1 symCurl psi)
      }

    const Eigen::VectorXd chi_psi = chi * psi;
    const Eigen::VectorXd trace_psi = trace * psi;
    const double lhs = volume_a + form_s(weights, clement, chi_phi, trace_psi) +
                       form_s(weights, clement, chi_psi, trace_phi) +
                       form_r(weights, clement, trace_phi, trace_psi, eta);
    const double rhs = volume_f -
                       form_c(geometry, weights, clement, mat, trace_p, trace_psi) +
                       form_s(weights, clement, chi_psi, ext_p) +
                       form_r(weights, clement, ext_p, trace_psi, eta);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(WProblem, DiscreteVariationalEquationHolds) {
  // Same slow-route oracle for the w-problem: (grad w_h, grad q) equals the
  // moment term minus the extension-trace boundary terms.
  SolverFixture s(2, 2, 40.0);
  const PlateSolver& solver = *s.solver;
  const PlateSolution sol = solver.solve(benchmark_load);

  const FeSpace& vec = solver.vector_space();
  const FeSpace& scalar = solver.scalar_space();
  const BoundaryGeometry& geometry = solver.boundary();
  const ClementProjector& clement = solver.clement();
  const BoundaryWeights& weights = solver.weights();
  const MaterialTensor& mat = solver.material();

  const SpMat chi = chi_matrix(vec, geometry, mat);
  const SpMat trace = trace_matrix(vec, geometry);
  const Eigen::VectorXd chi_phi = chi * sol.phi;
  const Eigen::VectorXd trace_phi = trace * sol.phi;
  const Eigen::VectorXd trace_p = scalar_trace_values(scalar, sol.p, geometry);
  const Eigen::VectorXd ext_p =
      extension_trace(solver.partition(), boundary_trace(scalar, sol.p, solver.partition()))
          .sample(geometry);

  const QuadRule rule = triangle_rule(2 * scalar.degree());
  const MomentField moment = solver.moments(sol);
  std::mt19937 rng(53);
  std::normal_distribution<double> gauss;
  std::vector<char> fixed(scalar.num_dofs(), 0);
  for (int d : solver.dirichlet_dofs()) fixed[d] = 1;
  double worst = 0;
  for (int trial = 0; trial < 6; ++trial) {
    // test functions in S_{h,0}
    Eigen::VectorXd q(scalar.num_dofs());
    for (int i = 0; i < q.size(); ++i) q[i] = fixed[i] ? 0.0 : gauss(rng);

    double grad_term = 0, moment_term = 0;
    FeFunction wf(scalar, sol.w), qf(scalar, q);
    for (int e = 0; e < s.mesh.num_elements(); ++e)
      for (int qq = 0; qq < rule.size(); ++qq) {
        const Eigen::Vector2d ref = rule.points.row(qq).transpose();
        const double wq = rule.weights[qq] * scalar.jacobian(e, ref).determinant();
        grad_term += wq * wf.gradient(e, ref).dot(qf.gradient(e, ref));
        moment_term +=
            wq * mat.apply_inverse(moment.value(e, ref)).trace() * qf.value(e, ref);
      }

    const Eigen::VectorXd ext_q =
        extension_trace(solver.partition(), boundary_trace(scalar, q, solver.partition()))
            .sample(geometry);
    const double rhs = moment_term - form_s(weights, clement, chi_phi, ext_q) -
                       form_c(geometry, weights, clement, mat, trace_p, ext_q) -
                       form_r(weights, clement, (trace_phi - ext_p).eval(), ext_q, solver.eta());
    worst = std::max(worst, std::abs(grad_term - rhs) / std::max(1.0, std::abs(rhs)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Moments, ConstantPressureGivesIdentity) {
  SolverFixture s(2, 1, 10.0);
  const FeSpace& scalar = s.solver->scalar_space();
  const FeSpace& vec = s.solver->vector_space();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(scalar.num_dofs());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(vec.num_dofs());
  const MomentField m = reconstruct_moments(scalar, vec, ones, zero);
  const Eigen::Matrix2d at = m.value_at({0.37, -0.21});
  EXPECT_NEAR((at - Eigen::Matrix2d::Identity()).norm(), 0, 1e-13);
}

TEST(Moments, RT0PotentialGivesZero) {
  SolverFixture s(2, 2, 40.0);
  const FeSpace& scalar = s.solver->scalar_space();
  const FeSpace& vec = s.solver->vector_space();
  const Eigen::VectorXd zero_p = Eigen::VectorXd::Zero(scalar.num_dofs());
  const Eigen::VectorXd phi = rt0_interpolant(vec, -0.6, {0.2, 0.9});
  const MomentField m = reconstruct_moments(scalar, vec, zero_p, phi);
  EXPECT_NEAR(m.value_at({0.1, 0.5}).norm(), 0, 1e-13);
  EXPECT_THROW(m.value_at({2.0, 0.0}), PointOutsideElement);
}

TEST(Moments, EvaluatorReturnsSymmetricMatrices) {
  SolverFixture s(3, 2, 40.0);
  const PlateSolution sol = s.solver->solve(benchmark_load);
  const MomentField m = s.solver->moments(sol);
  for (double x = -0.9; x < 1.0; x += 0.45)
    for (double y = -0.9; y < 1.0; y += 0.45) {
      const Eigen::Matrix2d mm = m.value_at({x, y});
      EXPECT_EQ(mm(0, 1), mm(1, 0));
    }
}

TEST(Pipeline, LoadScalingIsExactlyLinear) {
  SolverFixture s(3, 1, 10.0);
  const double alpha = -3.75;
  const PlateSolution sol1 = s.solver->solve(benchmark_load);
  const PlateSolution sol2 = s.solver->solve(
      [&](const Eigen::Vector2d& x) { return alpha * benchmark_load(x); });
  EXPECT_LT((sol2.p - alpha * sol1.p).norm() / sol1.p.norm(), 1e-12);
  EXPECT_LT((sol2.phi - alpha * sol1.phi).norm() / sol1.phi.norm(), 1e-12);
  EXPECT_LT((sol2.w - alpha * sol1.w).norm() / sol1.w.norm(), 1e-12);
}

TEST(Pipeline, RerunIsDeterministic) {
  SolverFixture s(3, 2, 40.0);
  const PlateSolution a = s.solver->solve(benchmark_load);
  const PlateSolution b = s.solver->solve(benchmark_load);
  EXPECT_EQ((a.p - b.p).norm(), 0.0);
  EXPECT_EQ((a.phi - b.phi).norm(), 0.0);
  EXPECT_EQ((a.w - b.w).norm(), 0.0);
}

TEST(ClampedPlate, ExtensionTermsVanishInWProblem) {
  const SideTags clamped{BoundaryTag::Clamped, BoundaryTag::Clamped, BoundaryTag::Clamped,
                         BoundaryTag::Clamped};
  SolverFixture s(3, 1, 10.0, clamped);
  const Eigen::VectorXd p = s.solver->solve_p(benchmark_load);
  const Eigen::VectorXd phi = s.solver->solve_phi(p);
  EXPECT_LT(s.solver->w_rhs_boundary(p, phi).cwiseAbs().maxCoeff(), 1e-12);
  // and the pipeline still completes
  const Eigen::VectorXd w = s.solver->solve_w(p, phi);
  EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Coercivity, PositiveAtDefaultPenalty) {
  for (int k = 1; k <= 3; ++k) {
    SolverFixture s(3, k, 10.0 * k * k);
    const CoercivityReport report = s.solver->coercivity_estimate();
    EXPECT_GT(report.estimate, 0.0) << "degree " << k;
    EXPECT_TRUE(report.converged) << "degree " << k;
  }
}

TEST(Coercivity, ReportsAtZeroPenaltyWithoutCrashing) {
  SolverFixture s(3, 1, 0.0);
  const CoercivityReport report = s.solver->coercivity_estimate();
  // eta = 0 may or may not be coercive; the diagnostic must report a value.
  EXPECT_TRUE(std::isfinite(report.estimate));
  if (report.estimate <= 0) {
    EXPECT_THROW(
        {
          const Eigen::VectorXd p = s.solver->solve_p(benchmark_load);
          s.solver->solve_phi(p);
        },
        NotCoercive);
  }
}

TEST(Coercivity, EstimateNondecreasingInPenalty) {
  const int k = 1;
  double prev = -1e300;
  for (double factor : {5.0, 10.0, 20.0}) {
    SolverFixture s(3, k, factor * k * k);
    const double estimate = s.solver->coercivity_estimate().estimate;
    EXPECT_GE(estimate, prev - 1e-9);
    prev = estimate;
  }
}

TEST(WeakBoundaryConditions, MomentNormalComponentDecreases) {
  double prev = 1e300;
  for (int level = 3; level <= 5; ++level) {
    SolverFixture s(level, 2, 40.0);
    const PlateSolution sol = s.solver->solve(benchmark_load);
    const double mnn = s.solver->moment_nn_boundary_norm(sol);
    EXPECT_LT(mnn, prev) << "level " << level;
    prev = mnn;
  }
}

TEST(SolutionExport, CentroidRowsAndDeterminism) {
  SolverFixture s(1, 1, 10.0);
  const PlateSolution sol = s.solver->solve(benchmark_load);
  const std::string path = testing::TempDir() + "plate_solution_test.csv";
  write_solution_csv(path, *s.solver, sol);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x,y,w,p,M11,M12,M22");
  int rows = 0;
  std::string line, all;
  while (std::getline(in, line)) {
    ++rows;
    all += line + "\n";
  }
  EXPECT_EQ(rows, s.mesh.num_elements());
  // byte-identical on a rerun
  write_solution_csv(path, *s.solver, sol);
  std::ifstream in2(path);
  std::getline(in2, header);
  std::string all2;
  while (std::getline(in2, line)) all2 += line + "\n";
  EXPECT_EQ(all, all2);
  std::remove(path.c_str());
}

TEST(PolygonMesh, LoadedTrapezoidSolvesEndToEnd) {
  // General polygon through the loader: skewed sides, one free component,
  // fixed edge = the clamped side with the lexicographically smallest
  // midpoint.
  const std::string path = testing::TempDir() + "plate_trapezoid.txt";
  {
    std::ofstream f(path);
    f << "nodes 4 elements 2 boundary 4\n"
      << "0 0\n2 0\n2.5 1.5\n-0.5 2\n"
      << "0 1 2\n0 2 3\n"
      << "0 1 s\n1 2 f\n2 3 s\n3 0 c\n";
  }
  const Mesh mesh = load_mesh(path);
  const BoundaryPartition part = classify_boundary(mesh);
  ASSERT_EQ(part.domain_edges.size(), 4u);
  EXPECT_EQ(part.free_components.size(), 1u);
  EXPECT_EQ(part.domain_edges[part.fixed_edge].tag, BoundaryTag::Clamped);
  const double perimeter = 2.0 + std::hypot(0.5, 1.5) + std::hypot(3.0, 0.5) + std::hypot(0.5, 2.0);
  EXPECT_NEAR(part.perimeter, perimeter, 1e-12);

  const PlateSolver solver(mesh, part, 2, 40.0, MaterialTensor::identity());
  const PlateSolution sol = solver.solve([](const Eigen::Vector2d&) { return 1.0; });
  EXPECT_TRUE(sol.w.allFinite());
  EXPECT_GT(sol.w.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(solver.rt0_residuals(sol.phi).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(solver.coupling_residual(sol.p), 1e-12);
  std::remove(path.c_str());
}

TEST(Quads, BilinearPipelineConverges) {
  // k = 1 on quad cells reproduces the first-order rates.
  StudyOptions options;
  options.degree = 1;
  options.levels = {3, 4, 5};
  options.kind = CellKind::Quad;
  const auto rows = convergence_study(options);
  EXPECT_NEAR(rows.back().order_w, 1.0, 0.15);
  EXPECT_NEAR(rows.back().order_moment, 1.0, 0.2);
}

}  // namespace
}  // namespace plate
