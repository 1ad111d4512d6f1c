// SPDX-License-Identifier: Apache-2.0

#include "plate/assembly.hpp"

namespace plate {

namespace {

/// symCurl of the basis vector field (phi_l e_c) given the physical gradient
/// of the scalar basis function phi_l.
Eigen::Matrix2d basis_symcurl(const Eigen::Vector2d& grad, int component) {
  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
  jac.row(component) = grad.transpose();
  return symcurl_from_jacobian(jac);
}

struct ElementQuad {
  // Per quadrature point: physical weight and basis data.
  std::vector<double> weight;
  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> grads;  // physical
  std::vector<Eigen::Vector2d> phys;
};

ElementQuad element_tables(const FeSpace& space, int e, const QuadRule& rule) {
  ElementQuad t;
  const int nq = rule.size();
  t.weight.resize(nq);
  t.values.resize(nq);
  t.grads.resize(nq);
  t.phys.resize(nq);
  for (int q = 0; q < nq; ++q) {
    const Eigen::Vector2d ref = rule.points.row(q).transpose();
    const Eigen::Matrix2d jac = space.jacobian(e, ref);
    t.weight[q] = rule.weights[q] * jac.determinant();
    t.values[q] = space.element().values(ref);
    const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
    t.grads[q] = space.element().gradients(ref) * jinv_t.transpose();
    t.phys[q] = space.to_physical(e, ref);
  }
  return t;
}

}  // namespace

QuadRule volume_rule(const Mesh& mesh, int order) {
  return mesh.kind == CellKind::Triangle ? triangle_rule(order) : square_rule(order);
}

CsrMatrix assemble(const FeSpace& test, const FeSpace& trial, VolumeForm form,
                   const MaterialTensor& material, int quad_order) {
  if (&test.mesh() != &trial.mesh())
    throw ShapeMismatch("assemble: test and trial spaces live on different meshes");
  const auto need = [&](int tc, int gc) {
    if (test.components() != tc || trial.components() != gc)
      throw ShapeMismatch("assemble: space components incompatible with the form");
  };
  switch (form) {
    case VolumeForm::GradGrad: need(1, 1); break;
    case VolumeForm::Mass: need(1, 1); break;
    case VolumeForm::SymCurlSymCurl: need(2, 2); break;
    case VolumeForm::TraceCoupling: need(2, 1); break;
  }
  const int k = std::max(test.degree(), trial.degree());
  const QuadRule rule = volume_rule(test.mesh(), quad_order < 0 ? 2 * k : quad_order);

  const Mesh& mesh = test.mesh();
  std::vector<Triplet> trip;
  const int nloc_t = test.element().dim() * test.components();
  const int nloc_g = trial.element().dim() * trial.components();
  trip.reserve(static_cast<size_t>(mesh.num_elements()) * nloc_t * nloc_g);
  Eigen::MatrixXd local(nloc_t, nloc_g);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementQuad tt = element_tables(test, e, rule);
    // Same mesh: trial tables differ only if the degree differs.
    const bool same = test.degree() == trial.degree();
    const ElementQuad tg = same ? ElementQuad{} : element_tables(trial, e, rule);
    const auto& gt = same ? tt : tg;
    local.setZero();

    for (int q = 0; q < static_cast<int>(tt.weight.size()); ++q) {
      const double w = tt.weight[q];
      switch (form) {
        case VolumeForm::GradGrad: {
          for (int i = 0; i < nloc_t; ++i)
            for (int j = 0; j < nloc_g; ++j)
              local(i, j) += w * tt.grads[q].row(i).dot(gt.grads[q].row(j));
          break;
        }
        case VolumeForm::Mass: {
          for (int i = 0; i < nloc_t; ++i)
            for (int j = 0; j < nloc_g; ++j)
              local(i, j) += w * tt.values[q][i] * gt.values[q][j];
          break;
        }
        case VolumeForm::SymCurlSymCurl: {
          const int nt = test.element().dim();
          std::vector<Eigen::Matrix2d> s(2 * nt), cs(2 * nt);
          for (int l = 0; l < nt; ++l)
            for (int c = 0; c < 2; ++c) {
              s[2 * l + c] = basis_symcurl(tt.grads[q].row(l).transpose(), c);
              cs[2 * l + c] = material.apply_inverse(s[2 * l + c]);
            }
          for (int i = 0; i < 2 * nt; ++i)
            for (int j = 0; j < 2 * nt; ++j)
              local(i, j) += w * cs[j].cwiseProduct(s[i]).sum();
          break;
        }
        case VolumeForm::TraceCoupling: {
          // (q I, symCurl psi)_{C^{-1}} = q * tr(C^{-1} symCurl psi)
          const int nt = test.element().dim();
          for (int l = 0; l < nt; ++l)
            for (int c = 0; c < 2; ++c) {
              const double tr_cinv =
                  material.apply_inverse(basis_symcurl(tt.grads[q].row(l).transpose(), c)).trace();
              for (int j = 0; j < nloc_g; ++j)
                local(2 * l + c, j) += w * tr_cinv * gt.values[q][j];
            }
          break;
        }
      }
    }

    const auto& dofs_t = test.element_scalar_dofs(e);
    const auto& dofs_g = trial.element_scalar_dofs(e);
    auto global_dof = [](const std::vector<int>& dofs, int comps, int local_idx) {
      return comps == 1 ? dofs[local_idx] : 2 * dofs[local_idx / 2] + local_idx % 2;
    };
    for (int i = 0; i < nloc_t; ++i) {
      const int gi = global_dof(dofs_t, test.components(), i);
      for (int j = 0; j < nloc_g; ++j) {
        const double v = local(i, j);
        if (v != 0.0) trip.emplace_back(gi, global_dof(dofs_g, trial.components(), j), v);
      }
    }
  }
  return CsrMatrix::from_triplets(test.num_dofs(), trial.num_dofs(), trip);
}

Eigen::VectorXd assemble_load(const FeSpace& scalar,
                              const std::function<double(const Eigen::Vector2d&)>& f,
                              int quad_order) {
  if (scalar.components() != 1) throw ShapeMismatch("assemble_load: scalar space required");
  const int k = scalar.degree();
  const QuadRule rule = volume_rule(scalar.mesh(), quad_order < 0 ? 2 * k + 2 : quad_order);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(scalar.num_dofs());
  for (int e = 0; e < scalar.mesh().num_elements(); ++e) {
    const ElementQuad t = element_tables(scalar, e, rule);
    const auto& dofs = scalar.element_scalar_dofs(e);
    for (int q = 0; q < static_cast<int>(t.weight.size()); ++q) {
      const double wf = t.weight[q] * f(t.phys[q]);
      for (int l = 0; l < t.values[q].size(); ++l) rhs[dofs[l]] += wf * t.values[q][l];
    }
  }
  return rhs;
}

Eigen::VectorXd assemble_tr_moment_rhs(const FeSpace& scalar,
                                       const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& moment,
                                       const MaterialTensor& material, int quad_order) {
  return assemble_load(
      scalar,
      [&](const Eigen::Vector2d& x) { return material.apply_inverse(moment(x)).trace(); },
      quad_order);
}

Eigen::MatrixXd rt0_moments(const FeSpace& vec_space) {
  if (vec_space.components() != 2) throw ShapeMismatch("rt0_moments: vector space required");
  const QuadRule rule = volume_rule(vec_space.mesh(), vec_space.degree() + 2);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(vec_space.num_dofs(), 3);
  for (int e = 0; e < vec_space.mesh().num_elements(); ++e) {
    const ElementQuad t = element_tables(vec_space, e, rule);
    const auto& dofs = vec_space.element_scalar_dofs(e);
    for (int q = 0; q < static_cast<int>(t.weight.size()); ++q) {
      const double w = t.weight[q];
      for (int l = 0; l < t.values[q].size(); ++l) {
        const double v = w * t.values[q][l];
        for (int c = 0; c < 2; ++c) {
          b(2 * dofs[l] + c, c) += v;
          b(2 * dofs[l] + c, 2) += v * t.phys[q][c];
        }
      }
    }
  }
  return b;
}

}  // namespace plate
