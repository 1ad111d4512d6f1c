// SPDX-License-Identifier: Apache-2.0

#include "plate/space.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace plate {

FeSpace::FeSpace(const Mesh& mesh, int degree, int components)
    : mesh_(&mesh), ref_(mesh.kind, degree), components_(components) {
  if (components != 1 && components != 2)
    throw ShapeMismatch("FeSpace: components must be 1 or 2");

  const int k = degree;
  const int nv = mesh.num_nodes();
  const int npe = mesh.nodes_per_element();
  const int edge_nodes = ref_.nodes_per_edge();

  // Vertex dofs coincide with mesh nodes; edge dofs are numbered per mesh
  // edge (from the smaller to the larger endpoint id); interior dofs follow.
  std::map<std::pair<int, int>, int> edge_index;
  auto edge_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  if (edge_nodes > 0) {
    for (const auto& el : mesh_->elements)
      for (int e = 0; e < npe; ++e) {
        auto [la, lb] = ref_.edge_vertices(e);
        edge_index.emplace(edge_key(el[la], el[lb]), 0);
      }
    int idx = 0;
    for (auto& kv : edge_index) kv.second = idx++;
  }
  const int n_edges = static_cast<int>(edge_index.size());
  const int interior_per_elem = ref_.dim() - npe - npe * edge_nodes;
  num_scalar_dofs_ = nv + n_edges * edge_nodes + mesh.num_elements() * interior_per_elem;

  dof_coords_.assign(num_scalar_dofs_, Eigen::Vector2d::Zero());
  elem_dofs_.assign(mesh.num_elements(), {});
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh_->elements[e];
    std::vector<int>& dofs = elem_dofs_[e];
    dofs.resize(ref_.dim());
    int local = 0;
    for (int v = 0; v < npe; ++v, ++local) dofs[local] = el[v];
    for (int le = 0; le < npe; ++le) {
      auto [la, lb] = ref_.edge_vertices(le);
      const int ga = el[la], gb = el[lb];
      const int base = nv + edge_index[edge_key(ga, gb)] * edge_nodes;
      for (int m = 1; m <= edge_nodes; ++m, ++local) {
        // Edge node m sits at fraction m/k from ga towards gb; the global
        // numbering runs from the smaller to the larger node id.
        const int pos = ga < gb ? m : k - m;
        dofs[local] = base + pos - 1;
      }
    }
    const int int_base = nv + n_edges * edge_nodes + e * interior_per_elem;
    for (int m = 0; m < interior_per_elem; ++m, ++local) dofs[local] = int_base + m;
    for (int l = 0; l < ref_.dim(); ++l)
      dof_coords_[dofs[l]] = to_physical(e, ref_.nodes()[l]);
  }
}

Eigen::Vector2d FeSpace::to_physical(int e, const Eigen::Vector2d& ref) const {
  const auto& el = mesh_->elements[e];
  const auto& x = mesh_->nodes;
  if (mesh_->kind == CellKind::Triangle)
    return x[el[0]] + ref.x() * (x[el[1]] - x[el[0]]) + ref.y() * (x[el[2]] - x[el[0]]);
  const double u = ref.x(), v = ref.y();
  return (1 - u) * (1 - v) * x[el[0]] + u * (1 - v) * x[el[1]] + u * v * x[el[2]] +
         (1 - u) * v * x[el[3]];
}

Eigen::Matrix2d FeSpace::jacobian(int e, const Eigen::Vector2d& ref) const {
  const auto& el = mesh_->elements[e];
  const auto& x = mesh_->nodes;
  Eigen::Matrix2d J;
  if (mesh_->kind == CellKind::Triangle) {
    J.col(0) = x[el[1]] - x[el[0]];
    J.col(1) = x[el[2]] - x[el[0]];
  } else {
    const double u = ref.x(), v = ref.y();
    J.col(0) = -(1 - v) * x[el[0]] + (1 - v) * x[el[1]] + v * x[el[2]] - v * x[el[3]];
    J.col(1) = -(1 - u) * x[el[0]] - u * x[el[1]] + u * x[el[2]] + (1 - u) * x[el[3]];
  }
  return J;
}

bool FeSpace::to_reference(int e, const Eigen::Vector2d& x, Eigen::Vector2d& ref, double tol) const {
  if (mesh_->kind == CellKind::Triangle) {
    const auto& el = mesh_->elements[e];
    Eigen::Matrix2d J;
    J.col(0) = mesh_->nodes[el[1]] - mesh_->nodes[el[0]];
    J.col(1) = mesh_->nodes[el[2]] - mesh_->nodes[el[0]];
    ref = J.inverse() * (x - mesh_->nodes[el[0]]);
    return ref.x() >= -tol && ref.y() >= -tol && ref.x() + ref.y() <= 1 + tol;
  }
  // Newton iteration for the bilinear map (one step suffices on parallelograms).
  ref = Eigen::Vector2d(0.5, 0.5);
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector2d r = to_physical(e, ref) - x;
    if (r.norm() < 1e-14) break;
    ref -= jacobian(e, ref).inverse() * r;
  }
  return ref.x() >= -tol && ref.y() >= -tol && ref.x() <= 1 + tol && ref.y() <= 1 + tol;
}

std::vector<int> FeSpace::edge_scalar_dofs(const MeshBoundaryEdge& edge) const {
  // The trace on a boundary edge is determined by the dofs whose nodes lie
  // on it: both endpoints plus the edge nodes.
  std::vector<int> out;
  const auto& dofs = elem_dofs_[edge.element];
  const auto& el = mesh_->elements[edge.element];
  const int npe = mesh_->nodes_per_element();
  int le = -1;
  for (int c = 0; c < npe; ++c) {
    auto [la, lb] = ref_.edge_vertices(c);
    if ((el[la] == edge.a && el[lb] == edge.b) || (el[la] == edge.b && el[lb] == edge.a)) {
      le = c;
      break;
    }
  }
  if (le < 0) throw ShapeMismatch("edge_scalar_dofs: edge not part of its owner element");
  auto [la, lb] = ref_.edge_vertices(le);
  out.push_back(el[la]);
  out.push_back(el[lb]);
  const int base = npe + le * ref_.nodes_per_edge();
  for (int m = 0; m < ref_.nodes_per_edge(); ++m) out.push_back(dofs[base + m]);
  return out;
}

std::vector<std::pair<int, double>> FeSpace::edge_trace_dofs(const MeshBoundaryEdge& edge) const {
  const std::vector<int> dofs = edge_scalar_dofs(edge);
  const int k = degree();
  // dofs[0] is the tail of the element's local edge, which may run against
  // the ccw boundary direction on inconsistently oriented input.
  const bool forward = dofs[0] == edge.a;
  std::vector<std::pair<int, double>> out;
  out.reserve(dofs.size());
  out.emplace_back(dofs[0], forward ? 0.0 : 1.0);
  out.emplace_back(dofs[1], forward ? 1.0 : 0.0);
  for (int m = 1; m < k; ++m) {
    const double u = static_cast<double>(m) / k;
    out.emplace_back(dofs[1 + m], forward ? u : 1.0 - u);
  }
  return out;
}

Eigen::Vector2d FeSpace::edge_ref_point(const MeshBoundaryEdge& edge, double u) const {
  const auto& el = mesh_->elements[edge.element];
  const int npe = mesh_->nodes_per_element();
  int la = -1, lb = -1;
  for (int v = 0; v < npe; ++v) {
    if (el[v] == edge.a) la = v;
    if (el[v] == edge.b) lb = v;
  }
  if (la < 0 || lb < 0) throw ShapeMismatch("edge_ref_point: edge not in its owner element");
  const auto& ref_nodes = ref_.nodes();
  return ref_nodes[la] + u * (ref_nodes[lb] - ref_nodes[la]);
}

std::vector<int> FeSpace::boundary_scalar_dofs(const BoundaryPartition& partition,
                                               std::initializer_list<BoundaryTag> tags) const {
  std::set<int> seen;
  std::vector<int> out;
  for (const auto& edge : partition.edges) {
    if (std::find(tags.begin(), tags.end(), edge.tag) == tags.end()) continue;
    for (int d : edge_scalar_dofs(edge))
      if (seen.insert(d).second) out.push_back(d);
  }
  return out;
}

std::vector<int> FeSpace::boundary_scalar_dofs(const BoundaryPartition& partition) const {
  return boundary_scalar_dofs(
      partition, {BoundaryTag::Clamped, BoundaryTag::SimplySupported, BoundaryTag::Free});
}

FeFunction::FeFunction(const FeSpace& space, const Eigen::VectorXd& coeffs)
    : space_(&space), coeffs_(&coeffs) {
  if (coeffs.size() != space.num_dofs())
    throw ShapeMismatch("FeFunction: coefficient vector length mismatch");
}

double FeFunction::value(int e, const Eigen::Vector2d& ref) const {
  const Eigen::VectorXd phi = space_->element().values(ref);
  const auto& dofs = space_->element_scalar_dofs(e);
  double v = 0;
  for (int l = 0; l < phi.size(); ++l) v += (*coeffs_)[dofs[l]] * phi[l];
  return v;
}

Eigen::Vector2d FeFunction::gradient(int e, const Eigen::Vector2d& ref) const {
  const auto gref = space_->element().gradients(ref);
  const Eigen::Matrix2d Jinv_t = space_->jacobian(e, ref).inverse().transpose();
  const auto& dofs = space_->element_scalar_dofs(e);
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int l = 0; l < gref.rows(); ++l)
    g += (*coeffs_)[dofs[l]] * (Jinv_t * gref.row(l).transpose());
  return g;
}

Eigen::Vector2d FeFunction::value2(int e, const Eigen::Vector2d& ref) const {
  const Eigen::VectorXd phi = space_->element().values(ref);
  const auto& dofs = space_->element_scalar_dofs(e);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int l = 0; l < phi.size(); ++l)
    for (int c = 0; c < 2; ++c) v[c] += (*coeffs_)[2 * dofs[l] + c] * phi[l];
  return v;
}

Eigen::Matrix2d FeFunction::jacobian2(int e, const Eigen::Vector2d& ref) const {
  const auto gref = space_->element().gradients(ref);
  const Eigen::Matrix2d Jinv_t = space_->jacobian(e, ref).inverse().transpose();
  const auto& dofs = space_->element_scalar_dofs(e);
  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
  for (int l = 0; l < gref.rows(); ++l) {
    const Eigen::Vector2d g = Jinv_t * gref.row(l).transpose();
    for (int c = 0; c < 2; ++c) jac.row(c) += (*coeffs_)[2 * dofs[l] + c] * g.transpose();
  }
  return jac;
}

Eigen::Matrix2d FeFunction::sym_curl(int e, const Eigen::Vector2d& ref) const {
  return symcurl_from_jacobian(jacobian2(e, ref));
}

Eigen::Matrix2d curl_from_jacobian(const Eigen::Matrix2d& jac) {
  Eigen::Matrix2d c;
  c << jac(0, 1), -jac(0, 0), jac(1, 1), -jac(1, 0);
  return c;
}

Eigen::Matrix2d symcurl_from_jacobian(const Eigen::Matrix2d& jac) {
  const Eigen::Matrix2d c = curl_from_jacobian(jac);
  return 0.5 * (c + c.transpose());
}

Eigen::Matrix2d eval_symcurl(const FeSpace& space, const Eigen::VectorXd& coeffs, int element,
                             const Eigen::Vector2d& x) {
  if (space.components() != 2) throw ShapeMismatch("eval_symcurl: vector space required");
  Eigen::Vector2d ref;
  if (!space.to_reference(element, x, ref))
    throw PointOutsideElement("eval_symcurl: point not inside the element");
  return FeFunction(space, coeffs).sym_curl(element, ref);
}

Eigen::VectorXd rt0_interpolant(const FeSpace& vec_space, double a, const Eigen::Vector2d& b) {
  if (vec_space.components() != 2) throw ShapeMismatch("rt0_interpolant: vector space required");
  Eigen::VectorXd coeffs(vec_space.num_dofs());
  for (int i = 0; i < vec_space.num_scalar_dofs(); ++i) {
    const Eigen::Vector2d v = a * vec_space.dof_coord(i) + b;
    coeffs[2 * i] = v.x();
    coeffs[2 * i + 1] = v.y();
  }
  return coeffs;
}

}  // namespace plate
