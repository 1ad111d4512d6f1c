// SPDX-License-Identifier: Apache-2.0

#include "plate/boundary.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include "plate/quadrature.hpp"

namespace plate {

namespace {

/// Inverse Vandermonde of the equispaced nodes {0, 1/k, ..., 1}; column i
/// holds the monomial coefficients of the i-th 1D Lagrange basis function.
Eigen::MatrixXd lagrange_coefficients(int k) {
  Eigen::MatrixXd v(k + 1, k + 1);
  for (int i = 0; i <= k; ++i) {
    const double u = static_cast<double>(i) / std::max(k, 1);
    for (int m = 0; m <= k; ++m) v(i, m) = std::pow(u, m);
  }
  return v.inverse();
}

double horner(const Eigen::MatrixXd& coeffs, int row, double u) {
  double p = 0;
  for (int m = static_cast<int>(coeffs.cols()) - 1; m >= 0; --m) p = p * u + coeffs(row, m);
  return p;
}

double horner_derivative(const Eigen::MatrixXd& coeffs, int row, double u) {
  double p = 0;
  for (int m = static_cast<int>(coeffs.cols()) - 1; m >= 1; --m) p = p * u + m * coeffs(row, m);
  return p;
}

}  // namespace

BoundaryGeometry::BoundaryGeometry(const Mesh& mesh, const BoundaryPartition& partition,
                                   int points_per_edge)
    : partition_(&partition), per_edge_(points_per_edge) {
  (void)mesh;
  const GaussRule1d rule = gauss_legendre(points_per_edge);
  points_.reserve(partition.edges.size() * points_per_edge);
  for (int e = 0; e < static_cast<int>(partition.edges.size()); ++e) {
    const auto& edge = partition.edges[e];
    for (int i = 0; i < points_per_edge; ++i) {
      Point p;
      p.u = rule.points[i];
      p.sigma = edge.sigma0 + p.u * edge.length;
      p.weight = rule.weights[i] * edge.length;
      p.x = edge.point(p.u);
      p.normal = edge.normal;
      p.tangent = edge.tangent;
      p.tag = edge.tag;
      p.mesh_edge = e;
      p.domain_edge = edge.domain_edge;
      p.h_e = edge.length;
      points_.push_back(p);
    }
  }
}

BoundaryScalarPoly::BoundaryScalarPoly(const BoundaryPartition& partition, int degree)
    : partition_(&partition) {
  coeffs_ = Eigen::MatrixXd::Zero(partition.edges.size(), degree + 1);
}

double BoundaryScalarPoly::value(int mesh_edge, double u) const {
  return horner(coeffs_, mesh_edge, u);
}

BoundaryScalarPoly boundary_trace(const FeSpace& scalar, const Eigen::VectorXd& coeffs,
                                  const BoundaryPartition& partition) {
  if (scalar.components() != 1) throw ShapeMismatch("boundary_trace: scalar space required");
  if (coeffs.size() != scalar.num_dofs())
    throw ShapeMismatch("boundary_trace: coefficient length mismatch");
  const int k = scalar.degree();
  const Eigen::MatrixXd lag = lagrange_coefficients(k);
  BoundaryScalarPoly trace(partition, k);
  for (int e = 0; e < static_cast<int>(partition.edges.size()); ++e) {
    for (const auto& [dof, u] : scalar.edge_trace_dofs(partition.edges[e])) {
      const int node = static_cast<int>(std::lround(u * k));
      trace.coeffs().row(e) += coeffs[dof] * lag.col(node).transpose();
    }
  }
  return trace;
}

BoundaryPolyField::BoundaryPolyField(const BoundaryPartition& partition, int degree)
    : partition_(&partition) {
  coeffs_x_ = Eigen::MatrixXd::Zero(partition.edges.size(), degree + 1);
  coeffs_y_ = Eigen::MatrixXd::Zero(partition.edges.size(), degree + 1);
}

Eigen::Vector2d BoundaryPolyField::value(int mesh_edge, double u) const {
  return {horner(coeffs_x_, mesh_edge, u), horner(coeffs_y_, mesh_edge, u)};
}

Eigen::Vector2d BoundaryPolyField::tangential_derivative(int mesh_edge, double u) const {
  const double inv_h = 1.0 / partition_->edges[mesh_edge].length;
  return {inv_h * horner_derivative(coeffs_x_, mesh_edge, u),
          inv_h * horner_derivative(coeffs_y_, mesh_edge, u)};
}

Eigen::VectorXd BoundaryPolyField::sample(const BoundaryGeometry& geometry) const {
  Eigen::VectorXd out(2 * geometry.num_points());
  const auto& pts = geometry.points();
  for (int q = 0; q < geometry.num_points(); ++q) {
    const Eigen::Vector2d v = value(pts[q].mesh_edge, pts[q].u);
    out[2 * q] = v.x();
    out[2 * q + 1] = v.y();
  }
  return out;
}

double BoundaryPolyField::max_vertex_jump() const {
  const int ne = static_cast<int>(partition_->edges.size());
  double mx = 0;
  for (int e = 0; e < ne; ++e) {
    const int next = (e + 1) % ne;
    mx = std::max(mx, (value(e, 1.0) - value(next, 0.0)).norm());
  }
  return mx;
}

BoundaryPolyField extension_trace(const BoundaryPartition& partition,
                                  const BoundaryScalarPoly& q_trace) {
  const int deg_q = q_trace.degree();
  BoundaryPolyField psi(partition, deg_q + 1);
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  const double sigma_fixed = partition.sigma_fixed;
  const double fixed_len = partition.domain_edges[partition.fixed_edge].length;

  for (int e = 0; e < static_cast<int>(partition.edges.size()); ++e) {
    const auto& edge = partition.edges[e];
    if (edge.domain_edge != partition.fixed_edge) {
      // psi(u) = offset - n h_e int_0^u q; exact antiderivative per edge.
      psi.coeffs_x()(e, 0) = offset.x();
      psi.coeffs_y()(e, 0) = offset.y();
      double total = 0;
      for (int m = 0; m <= deg_q; ++m) {
        const double c = q_trace.coeffs()(e, m) / (m + 1);
        psi.coeffs_x()(e, m + 1) = -edge.normal.x() * edge.length * c;
        psi.coeffs_y()(e, m + 1) = -edge.normal.y() * edge.length * c;
        total += c;
      }
      offset -= edge.normal * edge.length * total;
    } else {
      // Linear closure across the fixed edge: from the accumulated value at
      // x_A = gamma(sigma_E) back to zero at x_B = gamma(0). The fixed edge
      // is parametrized last, so `offset` already holds the full integral.
      const double r0 = 1.0 - (edge.sigma0 - sigma_fixed) / fixed_len;
      const double r1 = -edge.length / fixed_len;
      psi.coeffs_x()(e, 0) = offset.x() * r0;
      psi.coeffs_y()(e, 0) = offset.y() * r0;
      psi.coeffs_x()(e, 1) = offset.x() * r1;
      psi.coeffs_y()(e, 1) = offset.y() * r1;
    }
  }
  return psi;
}

ClementProjector::ClementProjector(const BoundaryGeometry& geometry) {
  const BoundaryPartition& part = geometry.partition();
  const int nq = geometry.num_points();
  const auto& pts = geometry.points();
  const int nd_edges = static_cast<int>(part.domain_edges.size());

  c_index_.assign(nd_edges, -1);
  overridden_.assign(nd_edges, 0);
  int n_data = 0;
  for (int d = 0; d < nd_edges; ++d)
    if (part.domain_edges[d].tag == BoundaryTag::SimplySupported) c_index_[d] = n_data++;
  comp_offset_.assign(part.free_components.size(), -1);
  for (int c = 0; c < static_cast<int>(part.free_components.size()); ++c) {
    comp_offset_[c] = n_data;
    n_data += 3;
  }

  data_from_values_ = Eigen::MatrixXd::Zero(n_data, 2 * nq);

  // Mean normal component per simply supported domain edge.
  for (int q = 0; q < nq; ++q) {
    const auto& p = pts[q];
    const int row = c_index_[p.domain_edge];
    if (row < 0) continue;
    const double s = p.weight / part.domain_edges[p.domain_edge].length;
    data_from_values_(row, 2 * q) += s * p.normal.x();
    data_from_values_(row, 2 * q + 1) += s * p.normal.y();
  }

  // L2 projection onto RT0 per free component; coefficients (b1, b2, a)
  // of r(x) = b + a x solve the 3x3 Gram system.
  for (int c = 0; c < static_cast<int>(part.free_components.size()); ++c) {
    Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(3, 2 * nq);
    for (int q = 0; q < nq; ++q) {
      const auto& p = pts[q];
      if (p.tag != BoundaryTag::Free ||
          part.domain_edges[p.domain_edge].free_component != c)
        continue;
      const double w = p.weight;
      const Eigen::Vector2d r[3] = {{1, 0}, {0, 1}, p.x};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) gram(i, j) += w * r[i].dot(r[j]);
        moments(i, 2 * q) += w * r[i].x();
        moments(i, 2 * q + 1) += w * r[i].y();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram);
    if (es.eigenvalues()(0) < 1e-12 * std::max(1.0, es.eigenvalues()(2)))
      throw DegenerateComponent("free-component RT0 Gram matrix is singular");
    data_from_values_.middleRows(comp_offset_[c], 3) = gram.ldlt().solve(moments);
  }

  // Compatibility overrides: c_E = r_C(x) . n_E for simply supported edges
  // adjacent to a free component (x the enclosed corner).
  for (int d = 0; d < nd_edges; ++d) {
    if (c_index_[d] < 0) continue;
    const DomainEdge& de = part.domain_edges[d];
    struct Adjacent {
      int component;
      Eigen::Vector2d corner;
    };
    std::vector<Adjacent> adj;
    const int neighbor_at_start = part.corners[de.corner_start].edge_in;
    const int neighbor_at_end = part.corners[de.corner_end].edge_out;
    if (part.domain_edges[neighbor_at_start].tag == BoundaryTag::Free)
      adj.push_back({part.domain_edges[neighbor_at_start].free_component,
                     part.corners[de.corner_start].position});
    if (part.domain_edges[neighbor_at_end].tag == BoundaryTag::Free)
      adj.push_back({part.domain_edges[neighbor_at_end].free_component,
                     part.corners[de.corner_end].position});
    if (adj.empty()) continue;
    if (adj.size() == 2 && adj[0].component != adj[1].component)
      throw DegenerateComponent(
          "simply supported edge adjacent to two distinct free components; "
          "compatibility data is ambiguous");
    const int off = comp_offset_[adj[0].component];
    const Eigen::Vector2d n = de.normal;
    const double xn = adj[0].corner.dot(n);
    data_from_values_.row(c_index_[d]) = n.x() * data_from_values_.row(off) +
                                         n.y() * data_from_values_.row(off + 1) +
                                         xn * data_from_values_.row(off + 2);
    overridden_[d] = 1;
  }

  // Corner values from the data, by the boundary-condition case table.
  const int nc = static_cast<int>(part.corners.size());
  corners_from_data_ = Eigen::MatrixXd::Zero(2 * nc, n_data);
  for (int k = 0; k < nc; ++k) {
    const Corner& corner = part.corners[k];
    const DomainEdge& in = part.domain_edges[corner.edge_in];
    const DomainEdge& out = part.domain_edges[corner.edge_out];
    const bool in_free = in.tag == BoundaryTag::Free;
    const bool out_free = out.tag == BoundaryTag::Free;
    if (in_free || out_free) {
      // Corner of a free component (covers free/free, free/ss, free/clamped):
      // value r_C(x) = b + a x.
      const int comp = in_free ? in.free_component : out.free_component;
      const int off = comp_offset_[comp];
      corners_from_data_(2 * k, off) = 1.0;
      corners_from_data_(2 * k, off + 2) = corner.position.x();
      corners_from_data_(2 * k + 1, off + 1) = 1.0;
      corners_from_data_(2 * k + 1, off + 2) = corner.position.y();
    } else if (in.tag == BoundaryTag::SimplySupported &&
               out.tag == BoundaryTag::SimplySupported) {
      Eigen::Matrix2d nmat;
      nmat.row(0) = in.normal.transpose();
      nmat.row(1) = out.normal.transpose();
      if (std::abs(nmat.determinant()) < 1e-12)
        throw DegenerateComponent("parallel normals at an interior simply supported corner");
      const Eigen::Matrix2d ninv = nmat.inverse();
      for (int r = 0; r < 2; ++r) {
        corners_from_data_(2 * k + r, c_index_[corner.edge_in]) += ninv(r, 0);
        corners_from_data_(2 * k + r, c_index_[corner.edge_out]) += ninv(r, 1);
      }
    } else if (in.tag == BoundaryTag::SimplySupported ||
               out.tag == BoundaryTag::SimplySupported) {
      // Simply supported / clamped interface: normal component c_E of the
      // simply supported edge, zero tangential component.
      const bool in_is_ss = in.tag == BoundaryTag::SimplySupported;
      const DomainEdge& ss = in_is_ss ? in : out;
      const int row = c_index_[in_is_ss ? corner.edge_in : corner.edge_out];
      corners_from_data_(2 * k, row) = ss.normal.x();
      corners_from_data_(2 * k + 1, row) = ss.normal.y();
    }
    // interior clamped corner: zero
  }

  // Edgewise-P1 interpolation of the corner values at the quadrature points.
  values_from_data_ = Eigen::MatrixXd::Zero(2 * nq, n_data);
  for (int q = 0; q < nq; ++q) {
    const auto& p = pts[q];
    const DomainEdge& de = part.domain_edges[p.domain_edge];
    const double ud = (p.sigma - de.sigma_start) / de.length;
    const int cs = de.corner_start, ce = de.corner_end;
    values_from_data_.row(2 * q) =
        (1 - ud) * corners_from_data_.row(2 * cs) + ud * corners_from_data_.row(2 * ce);
    values_from_data_.row(2 * q + 1) =
        (1 - ud) * corners_from_data_.row(2 * cs + 1) + ud * corners_from_data_.row(2 * ce + 1);
  }
}

Eigen::VectorXd ClementProjector::data(const Eigen::VectorXd& qp_values) const {
  if (qp_values.size() != data_from_values_.cols())
    throw ShapeMismatch("ClementProjector: value vector length mismatch");
  return data_from_values_ * qp_values;
}

Eigen::VectorXd ClementProjector::project(const Eigen::VectorXd& qp_values) const {
  return values_from_data_ * data(qp_values);
}

Eigen::VectorXd ClementProjector::filter(const Eigen::VectorXd& qp_values) const {
  return qp_values - project(qp_values);
}

BoundaryWeights make_boundary_weights(const BoundaryGeometry& geometry) {
  const int nq = geometry.num_points();
  const auto& pts = geometry.points();
  std::vector<Triplet> ts, tr, tf;
  for (int q = 0; q < nq; ++q) {
    const auto& p = pts[q];
    const double w = p.weight;
    tf.emplace_back(2 * q, 2 * q, w);
    tf.emplace_back(2 * q + 1, 2 * q + 1, w);
    if (p.tag == BoundaryTag::SimplySupported) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double nn = p.normal[i] * p.normal[j];
          if (nn == 0.0) continue;
          ts.emplace_back(2 * q + i, 2 * q + j, w * nn);
          tr.emplace_back(2 * q + i, 2 * q + j, w / p.h_e * nn);
        }
    } else if (p.tag == BoundaryTag::Free) {
      for (int i = 0; i < 2; ++i) {
        ts.emplace_back(2 * q + i, 2 * q + i, w);
        tr.emplace_back(2 * q + i, 2 * q + i, w / p.h_e);
      }
    }
  }
  BoundaryWeights out;
  out.consistency.resize(2 * nq, 2 * nq);
  out.consistency.setFromTriplets(ts.begin(), ts.end());
  out.penalty_unit.resize(2 * nq, 2 * nq);
  out.penalty_unit.setFromTriplets(tr.begin(), tr.end());
  out.full.resize(2 * nq, 2 * nq);
  out.full.setFromTriplets(tf.begin(), tf.end());
  return out;
}

SpMat trace_matrix(const FeSpace& vec_space, const BoundaryGeometry& geometry) {
  if (vec_space.components() != 2) throw ShapeMismatch("trace_matrix: vector space required");
  const auto& part = geometry.partition();
  std::vector<Triplet> trip;
  for (int q = 0; q < geometry.num_points(); ++q) {
    const auto& p = geometry.points()[q];
    const auto& edge = part.edges[p.mesh_edge];
    const Eigen::Vector2d ref = vec_space.edge_ref_point(edge, p.u);
    const Eigen::VectorXd vals = vec_space.element().values(ref);
    const auto& dofs = vec_space.element_scalar_dofs(edge.element);
    for (int l = 0; l < vals.size(); ++l) {
      if (vals[l] == 0.0) continue;
      for (int c = 0; c < 2; ++c) trip.emplace_back(2 * q + c, 2 * dofs[l] + c, vals[l]);
    }
  }
  SpMat t(2 * geometry.num_points(), vec_space.num_dofs());
  t.setFromTriplets(trip.begin(), trip.end());
  t.makeCompressed();
  return t;
}

SpMat chi_matrix(const FeSpace& vec_space, const BoundaryGeometry& geometry,
                 const MaterialTensor& material) {
  if (vec_space.components() != 2) throw ShapeMismatch("chi_matrix: vector space required");
  const auto& part = geometry.partition();
  std::vector<Triplet> trip;
  for (int q = 0; q < geometry.num_points(); ++q) {
    const auto& p = geometry.points()[q];
    const auto& edge = part.edges[p.mesh_edge];
    const Eigen::Vector2d ref = vec_space.edge_ref_point(edge, p.u);
    const Eigen::Matrix2d jinv = vec_space.jacobian(edge.element, ref).inverse();
    const Eigen::Matrix<double, Eigen::Dynamic, 2> grads =
        vec_space.element().gradients(ref) * jinv;
    const auto& dofs = vec_space.element_scalar_dofs(edge.element);
    for (int l = 0; l < grads.rows(); ++l) {
      for (int c = 0; c < 2; ++c) {
        Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
        jac.row(c) = grads.row(l);
        const Eigen::Vector2d chi =
            material.apply_inverse(symcurl_from_jacobian(jac)) * p.tangent;
        for (int d = 0; d < 2; ++d)
          if (chi[d] != 0.0) trip.emplace_back(2 * q + d, 2 * dofs[l] + c, chi[d]);
      }
    }
  }
  SpMat x(2 * geometry.num_points(), vec_space.num_dofs());
  x.setFromTriplets(trip.begin(), trip.end());
  x.makeCompressed();
  return x;
}

Eigen::VectorXd scalar_trace_values(const FeSpace& scalar, const Eigen::VectorXd& coeffs,
                                    const BoundaryGeometry& geometry) {
  if (scalar.components() != 1) throw ShapeMismatch("scalar_trace_values: scalar space required");
  FeFunction f(scalar, coeffs);
  const auto& part = geometry.partition();
  Eigen::VectorXd out(geometry.num_points());
  for (int q = 0; q < geometry.num_points(); ++q) {
    const auto& p = geometry.points()[q];
    const auto& edge = part.edges[p.mesh_edge];
    out[q] = f.value(edge.element, scalar.edge_ref_point(edge, p.u));
  }
  return out;
}

Eigen::VectorXd c_flux_values(const BoundaryGeometry& geometry, const MaterialTensor& material,
                              const Eigen::VectorXd& scalar_values) {
  // (C^{-1} q I) t = q/(D(1+nu)) t.
  const double scale = material.inverse_identity_scale();
  Eigen::VectorXd out(2 * geometry.num_points());
  for (int q = 0; q < geometry.num_points(); ++q) {
    const Eigen::Vector2d v = scale * scalar_values[q] * geometry.points()[q].tangent;
    out[2 * q] = v.x();
    out[2 * q + 1] = v.y();
  }
  return out;
}

ExtensionOperator::ExtensionOperator(const FeSpace& scalar, const BoundaryGeometry& geometry) {
  const BoundaryPartition& part = geometry.partition();
  boundary_dofs_ = scalar.boundary_scalar_dofs(part);
  std::unordered_map<int, int> column;
  for (int j = 0; j < static_cast<int>(boundary_dofs_.size()); ++j)
    column[boundary_dofs_[j]] = j;

  const int k = scalar.degree();
  const Eigen::MatrixXd lag = lagrange_coefficients(k);
  // dof -> (mesh edge, Lagrange node index on that edge)
  std::vector<std::vector<std::pair<int, int>>> support(boundary_dofs_.size());
  for (int e = 0; e < static_cast<int>(part.edges.size()); ++e)
    for (const auto& [dof, u] : scalar.edge_trace_dofs(part.edges[e]))
      support[column.at(dof)].emplace_back(e, static_cast<int>(std::lround(u * k)));

  qp_matrix_.resize(2 * geometry.num_points(), static_cast<int>(boundary_dofs_.size()));
  BoundaryScalarPoly basis(part, k);
  for (int j = 0; j < static_cast<int>(boundary_dofs_.size()); ++j) {
    for (const auto& [e, node] : support[j]) basis.coeffs().row(e) += lag.col(node).transpose();
    qp_matrix_.col(j) = extension_trace(part, basis).sample(geometry);
    for (const auto& [e, node] : support[j]) basis.coeffs().row(e).setZero();
  }
}

Eigen::VectorXd ExtensionOperator::apply(const Eigen::VectorXd& scalar_coeffs) const {
  Eigen::VectorXd restricted(boundary_dofs_.size());
  for (int j = 0; j < static_cast<int>(boundary_dofs_.size()); ++j)
    restricted[j] = scalar_coeffs[boundary_dofs_[j]];
  return qp_matrix_ * restricted;
}

double form_s(const BoundaryWeights& weights, const ClementProjector& clement,
              const Eigen::VectorXd& chi_values, const Eigen::VectorXd& target_values) {
  return chi_values.dot(weights.consistency * clement.filter(target_values));
}

double form_c(const BoundaryGeometry& geometry, const BoundaryWeights& weights,
              const ClementProjector& clement, const MaterialTensor& material,
              const Eigen::VectorXd& scalar_trace, const Eigen::VectorXd& target_values) {
  const Eigen::VectorXd flux = c_flux_values(geometry, material, scalar_trace);
  return flux.dot(weights.full * clement.filter(target_values));
}

double form_r(const BoundaryWeights& weights, const ClementProjector& clement,
              const Eigen::VectorXd& a_values, const Eigen::VectorXd& b_values, double eta) {
  if (!(eta > 0)) throw NonpositivePenalty("form_r: penalty parameter must be positive");
  return eta * clement.filter(a_values).dot(weights.penalty_unit * clement.filter(b_values));
}

void dump_boundary_field(const std::string& path, const BoundaryGeometry& geometry,
                         const Eigen::VectorXd& qp_values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write boundary field dump: " + path);
  out << "sigma,value_x,value_y\n";
  out.precision(17);
  for (int q = 0; q < geometry.num_points(); ++q)
    out << geometry.points()[q].sigma << "," << qp_values[2 * q] << "," << qp_values[2 * q + 1]
        << "\n";
}

}  // namespace plate
