// SPDX-License-Identifier: Apache-2.0

#include "plate/verification.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

namespace plate {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Coefficient row of (a,b,c,d) and the sin-particular value for the n-th
/// derivative of g at x.
void g_row(double x, int n, Eigen::Vector4d& row, double& particular) {
  const double ch = std::cosh(kPi * x), sh = std::sinh(kPi * x);
  const double s = std::sin(kPi * x), c = std::cos(kPi * x);
  const double pn = std::pow(kPi, n);
  // d^n/dx^n of cosh(pi x) alternates ch/sh; x-carrying terms use Leibniz.
  const double chn = pn * (n % 2 == 0 ? ch : sh);
  const double shn = pn * (n % 2 == 0 ? sh : ch);
  const double chn1 = n == 0 ? 0 : n * std::pow(kPi, n - 1) * ((n - 1) % 2 == 0 ? ch : sh);
  const double shn1 = n == 0 ? 0 : n * std::pow(kPi, n - 1) * ((n - 1) % 2 == 0 ? sh : ch);
  row[0] = chn;
  row[1] = x * chn + chn1;
  row[2] = shn;
  row[3] = x * shn + shn1;
  switch (n % 4) {
    case 0: particular = pn * s; break;
    case 1: particular = pn * c; break;
    case 2: particular = -pn * s; break;
    default: particular = -pn * c; break;
  }
}

}  // namespace

std::pair<Eigen::Matrix4d, Eigen::Vector4d> ExactSolution::boundary_condition_system() {
  Eigen::Matrix4d m;
  Eigen::Vector4d rhs;
  Eigen::Vector4d row;
  double part;
  // clamped at x = -1: g(-1) = 0, g'(-1) = 0
  g_row(-1.0, 0, row, part);
  m.row(0) = row.transpose();
  rhs[0] = -part;
  g_row(-1.0, 1, row, part);
  m.row(1) = row.transpose();
  rhs[1] = -part;
  // free at x = +1: g''(1) = 0, g'''(1) - 2 pi^2 g'(1) = 0
  g_row(1.0, 2, row, part);
  m.row(2) = row.transpose();
  rhs[2] = -part;
  Eigen::Vector4d row3, row1;
  double part3, part1;
  g_row(1.0, 3, row3, part3);
  g_row(1.0, 1, row1, part1);
  m.row(3) = (row3 - 2 * kPi * kPi * row1).transpose();
  rhs[3] = -(part3 - 2 * kPi * kPi * part1);
  return {m, rhs};
}

ExactSolution::ExactSolution(const MaterialTensor& material) {
  if (!material.is_identity())
    throw MissingReference("the closed-form benchmark solution requires the identity material");
  const auto [m, rhs] = boundary_condition_system();
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  if (!lu.isInvertible())
    throw SingularSystem("boundary-condition system for the exact constants is singular");
  abcd_ = lu.solve(rhs);
}

double ExactSolution::g(double x, int n) const {
  Eigen::Vector4d row;
  double part;
  g_row(x, n, row, part);
  return row.dot(abcd_) + part;
}

double ExactSolution::p1d(double x, int n) const {
  // P(x) = 2 pi^2 (sin(pi x) + sinh(pi (x+1)) / cosh(2 pi)).
  const double pn = std::pow(kPi, n);
  double trig;
  switch (n % 4) {
    case 0: trig = std::sin(kPi * x); break;
    case 1: trig = std::cos(kPi * x); break;
    case 2: trig = -std::sin(kPi * x); break;
    default: trig = -std::cos(kPi * x); break;
  }
  const double hyp = (n % 2 == 0 ? std::sinh(kPi * (x + 1)) : std::cosh(kPi * (x + 1))) /
                     std::cosh(2 * kPi);
  return 2 * kPi * kPi * pn * (trig + hyp);
}

double ExactSolution::load(const Eigen::Vector2d& x) const {
  return 4 * std::pow(kPi, 4) * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
}

double ExactSolution::w(const Eigen::Vector2d& x) const {
  return g(x.x(), 0) * std::sin(kPi * x.y());
}

Eigen::Vector2d ExactSolution::grad_w(const Eigen::Vector2d& x) const {
  return {g(x.x(), 1) * std::sin(kPi * x.y()), kPi * g(x.x(), 0) * std::cos(kPi * x.y())};
}

Eigen::Matrix2d ExactSolution::hess_w(const Eigen::Vector2d& x) const {
  const double s = std::sin(kPi * x.y()), c = std::cos(kPi * x.y());
  Eigen::Matrix2d h;
  h << g(x.x(), 2) * s, kPi * g(x.x(), 1) * c, kPi * g(x.x(), 1) * c,
      -kPi * kPi * g(x.x(), 0) * s;
  return h;
}

Eigen::Matrix2d ExactSolution::moment(const Eigen::Vector2d& x) const {
  return -hess_w(x);  // identity material
}

double ExactSolution::p(const Eigen::Vector2d& x) const {
  return p1d(x.x(), 0) * std::sin(kPi * x.y());
}

Eigen::Vector2d ExactSolution::grad_p(const Eigen::Vector2d& x) const {
  return {p1d(x.x(), 1) * std::sin(kPi * x.y()), kPi * p1d(x.x(), 0) * std::cos(kPi * x.y())};
}

Eigen::Vector2d ExactSolution::phi(const Eigen::Vector2d& x) const {
  // Solves symCurl phi = M - p I; one smooth representative.
  const double a = (g(x.x(), 2) + p1d(x.x(), 0)) / kPi;
  const double amp = 2 * g(x.x(), 1) - (g(x.x(), 3) + p1d(x.x(), 1)) / (kPi * kPi);
  return {a * std::cos(kPi * x.y()), -amp * std::sin(kPi * x.y())};
}

Eigen::Matrix2d ExactSolution::grad_phi(const Eigen::Vector2d& x) const {
  const double s = std::sin(kPi * x.y()), c = std::cos(kPi * x.y());
  const double amp = 2 * g(x.x(), 1) - (g(x.x(), 3) + p1d(x.x(), 1)) / (kPi * kPi);
  const double damp = 2 * g(x.x(), 2) - (g(x.x(), 4) + p1d(x.x(), 2)) / (kPi * kPi);
  Eigen::Matrix2d j;
  j.row(0) << (g(x.x(), 3) + p1d(x.x(), 1)) * c / kPi, -(g(x.x(), 2) + p1d(x.x(), 0)) * s;
  j.row(1) << -damp * s, -kPi * amp * c;
  return j;
}

ReferenceFields exact_references(std::shared_ptr<const ExactSolution> exact) {
  ReferenceFields r;
  r.w = [exact](const Eigen::Vector2d& x) { return exact->w(x); };
  r.grad_w = [exact](const Eigen::Vector2d& x) { return exact->grad_w(x); };
  r.moment = [exact](const Eigen::Vector2d& x) { return exact->moment(x); };
  r.has_potentials = true;
  r.p = [exact](const Eigen::Vector2d& x) { return exact->p(x); };
  r.phi = [exact](const Eigen::Vector2d& x) { return exact->phi(x); };
  r.grad_phi = [exact](const Eigen::Vector2d& x) { return exact->grad_phi(x); };
  return r;
}

ReferenceFields numerical_references(std::shared_ptr<const PlateSolver> fine,
                                     std::shared_ptr<const PlateSolution> solution) {
  if (!fine->mesh().structured())
    throw MissingReference("numerical references require a native square mesh");
  ReferenceFields r;
  r.w = [fine, solution](const Eigen::Vector2d& x) {
    const auto [e, ref] = fine->mesh().locate(x);
    return FeFunction(fine->scalar_space(), solution->w).value(e, ref);
  };
  r.grad_w = [fine, solution](const Eigen::Vector2d& x) {
    const auto [e, ref] = fine->mesh().locate(x);
    return FeFunction(fine->scalar_space(), solution->w).gradient(e, ref);
  };
  r.moment = [fine, solution](const Eigen::Vector2d& x) {
    const auto [e, ref] = fine->mesh().locate(x);
    return MomentField(fine->scalar_space(), fine->vector_space(), solution->p, solution->phi)
        .value(e, ref);
  };
  r.has_potentials = true;
  r.p = [fine, solution](const Eigen::Vector2d& x) {
    const auto [e, ref] = fine->mesh().locate(x);
    return FeFunction(fine->scalar_space(), solution->p).value(e, ref);
  };
  r.phi = [fine, solution](const Eigen::Vector2d& x) {
    const auto [e, ref] = fine->mesh().locate(x);
    return FeFunction(fine->vector_space(), solution->phi).value2(e, ref);
  };
  r.grad_phi = [fine, solution](const Eigen::Vector2d& x) {
    const auto [e, ref] = fine->mesh().locate(x);
    return FeFunction(fine->vector_space(), solution->phi).jacobian2(e, ref);
  };
  return r;
}

ErrorNorms error_norms(const PlateSolver& solver, const PlateSolution& solution,
                       const ReferenceFields& reference, bool want_potentials) {
  if (want_potentials && !reference.has_potentials)
    throw MissingReference("p/phi errors requested without reference fields");

  const FeSpace& scalar = solver.scalar_space();
  const FeSpace& vec = solver.vector_space();
  const Mesh& mesh = solver.mesh();
  const int k = scalar.degree();
  const QuadRule rule = volume_rule(mesh, 2 * k + 2);

  const FeFunction wf(scalar, solution.w);
  const FeFunction pf(scalar, solution.p);
  const FeFunction phif(vec, solution.phi);

  // Align the reference phi with the discrete RT0-orthogonal representative.
  double a_align = 0;
  Eigen::Vector2d b_align = Eigen::Vector2d::Zero();
  if (want_potentials) {
    Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
    Eigen::Vector3d mom = Eigen::Vector3d::Zero();
    for (int e = 0; e < mesh.num_elements(); ++e) {
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::Vector2d ref = rule.points.row(q).transpose();
        const double wq = rule.weights[q] * scalar.jacobian(e, ref).determinant();
        const Eigen::Vector2d x = scalar.to_physical(e, ref);
        const Eigen::Vector2d rphi = reference.phi(x);
        const Eigen::Vector2d r[3] = {{1, 0}, {0, 1}, x};
        for (int i = 0; i < 3; ++i) {
          mom[i] += wq * r[i].dot(rphi);
          for (int j = 0; j < 3; ++j) gram(i, j) += wq * r[i].dot(r[j]);
        }
      }
    }
    const Eigen::Vector3d c = gram.ldlt().solve(mom);
    b_align = {c[0], c[1]};
    a_align = c[2];
  }

  ErrorNorms out;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d ref = rule.points.row(q).transpose();
      const double wq = rule.weights[q] * scalar.jacobian(e, ref).determinant();
      const Eigen::Vector2d x = scalar.to_physical(e, ref);

      const double dw = wf.value(e, ref) - reference.w(x);
      const Eigen::Vector2d dgw = wf.gradient(e, ref) - reference.grad_w(x);
      out.h1_w += wq * (dw * dw + dgw.squaredNorm());

      const Eigen::Matrix2d dm =
          pf.value(e, ref) * Eigen::Matrix2d::Identity() + phif.sym_curl(e, ref) -
          reference.moment(x);
      out.l2_moment += wq * dm.squaredNorm();

      if (want_potentials) {
        const double dp = pf.value(e, ref) - reference.p(x);
        out.l2_p += wq * dp * dp;
        const Eigen::Vector2d dphi =
            phif.value2(e, ref) - (reference.phi(x) - b_align - a_align * x);
        const Eigen::Matrix2d dgphi = phif.jacobian2(e, ref) -
                                      (reference.grad_phi(x) -
                                       a_align * Eigen::Matrix2d::Identity());
        out.h1_phi += wq * (dphi.squaredNorm() + dgphi.squaredNorm());
      }
    }
  }
  out.h1_w = std::sqrt(out.h1_w);
  out.l2_moment = std::sqrt(out.l2_moment);
  out.l2_p = std::sqrt(out.l2_p);
  out.h1_phi = std::sqrt(out.h1_phi);
  return out;
}

double default_eta(int degree) { return 10.0 * degree * degree; }

namespace {

bool is_benchmark_layout(const SideTags& tags) {
  return tags.west == BoundaryTag::Clamped && tags.north == BoundaryTag::SimplySupported &&
         tags.east == BoundaryTag::Free && tags.south == BoundaryTag::SimplySupported;
}

ErrorNorms run_level(const StudyOptions& options, int level, double eta,
                     const std::function<double(const Eigen::Vector2d&)>& load,
                     const ReferenceFields& reference) {
  const Mesh mesh = build_square_mesh(level, options.kind);
  const BoundaryPartition partition = classify_boundary(mesh, options.tags);
  const PlateSolver solver(mesh, partition, options.degree, eta, options.material);
  const PlateSolution solution = solver.solve(load);
  return error_norms(solver, solution, reference, true);
}

}  // namespace

std::vector<StudyRow> convergence_study(const StudyOptions& options) {
  if (options.levels.empty()) throw InvalidConfig("convergence_study: empty level list");
  for (size_t i = 1; i < options.levels.size(); ++i)
    if (options.levels[i] <= options.levels[i - 1])
      throw InvalidConfig("convergence_study: levels must be ascending");
  const double eta = options.eta < 0 ? default_eta(options.degree) : options.eta;

  std::function<double(const Eigen::Vector2d&)> load = options.load;
  ReferenceFields reference;
  const bool use_exact = options.material.is_identity() && is_benchmark_layout(options.tags) &&
                         !options.force_numerical_reference && !load;
  if (use_exact) {
    auto exact = std::make_shared<const ExactSolution>(options.material);
    load = [exact](const Eigen::Vector2d& x) { return exact->load(x); };
    reference = exact_references(exact);
  } else {
    if (!load) {
      load = [](const Eigen::Vector2d& x) {
        return 4 * std::pow(kPi, 4) * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
      };
    }
    const int ref_level = options.levels.back() + 2;
    auto mesh = std::make_shared<const Mesh>(build_square_mesh(ref_level, options.kind));
    auto partition =
        std::make_shared<const BoundaryPartition>(classify_boundary(*mesh, options.tags));
    auto fine = std::shared_ptr<const PlateSolver>(
        new PlateSolver(*mesh, *partition, options.degree, eta, options.material),
        [mesh, partition](const PlateSolver* s) { delete s; });
    auto solution = std::make_shared<const PlateSolution>(fine->solve(load));
    reference = numerical_references(fine, solution);
  }

  const int n = static_cast<int>(options.levels.size());
  std::vector<ErrorNorms> errors(n);
  const int threads = std::max(1, options.threads);
  for (int start = 0; start < n; start += threads) {
    const int stop = std::min(n, start + threads);
    std::vector<std::future<ErrorNorms>> futures;
    for (int i = start + 1; i < stop; ++i)
      futures.push_back(std::async(std::launch::async, run_level, std::cref(options),
                                   options.levels[i], eta, std::cref(load),
                                   std::cref(reference)));
    errors[start] = run_level(options, options.levels[start], eta, load, reference);
    for (int i = start + 1; i < stop; ++i) errors[i] = futures[i - start - 1].get();
  }

  std::vector<StudyRow> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i].level = options.levels[i];
    rows[i].h1_w = errors[i].h1_w;
    rows[i].l2_moment = errors[i].l2_moment;
    rows[i].l2_p = errors[i].l2_p;
    rows[i].h1_phi = errors[i].h1_phi;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto order = [&](double prev, double cur) {
      return i == 0 || !(prev > 0) || !(cur > 0) ? nan : std::log2(prev / cur);
    };
    rows[i].order_w = order(i ? errors[i - 1].h1_w : 0, errors[i].h1_w);
    rows[i].order_moment = order(i ? errors[i - 1].l2_moment : 0, errors[i].l2_moment);
    rows[i].order_p = order(i ? errors[i - 1].l2_p : 0, errors[i].l2_p);
    rows[i].order_phi = order(i ? errors[i - 1].h1_phi : 0, errors[i].h1_phi);
  }
  return rows;
}

namespace {

std::string fmt6(double v) {
  if (std::isnan(v)) return "";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out << "L,h1_w,order_w,l2_M,order_M,l2_p,order_p,h1_phi,order_phi\n";
  for (const auto& r : rows)
    out << r.level << "," << fmt6(r.h1_w) << "," << fmt6(r.order_w) << "," << fmt6(r.l2_moment)
        << "," << fmt6(r.order_moment) << "," << fmt6(r.l2_p) << "," << fmt6(r.order_p) << ","
        << fmt6(r.h1_phi) << "," << fmt6(r.order_phi) << "\n";
  return out.str();
}

std::string study_text(const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%3s  %12s %7s  %12s %7s  %12s %7s  %12s %7s\n", "L",
                "|w-w_h|_1", "order", "|M-M_h|_0", "order", "|p-p_h|_0", "order", "|phi-ph|_1",
                "order");
  out << buf;
  for (const auto& r : rows) {
    auto ord = [](double v) {
      if (std::isnan(v)) return std::string("-");
      char b[32];
      std::snprintf(b, sizeof b, "%.3f", v);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%3d  %12.3e %7s  %12.3e %7s  %12.3e %7s  %12.3e %7s\n",
                  r.level, r.h1_w, ord(r.order_w).c_str(), r.l2_moment,
                  ord(r.order_moment).c_str(), r.l2_p, ord(r.order_p).c_str(), r.h1_phi,
                  ord(r.order_phi).c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace plate
