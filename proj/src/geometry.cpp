// SPDX-License-Identifier: Apache-2.0

#include "plate/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace plate {

namespace {

constexpr double kGeomTol = 1e-12;

Eigen::Vector2d ccw_normal(const Eigen::Vector2d& tangent) {
  // Outward normal of a counterclockwise-oriented boundary.
  return {tangent.y(), -tangent.x()};
}

}  // namespace

char tag_letter(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Clamped: return 'c';
    case BoundaryTag::SimplySupported: return 's';
    case BoundaryTag::Free: return 'f';
  }
  return '?';
}

BoundaryTag tag_from_letter(char c) {
  switch (c) {
    case 'c': return BoundaryTag::Clamped;
    case 's': return BoundaryTag::SimplySupported;
    case 'f': return BoundaryTag::Free;
    default: throw IoError(std::string("unknown boundary tag '") + c + "'");
  }
}

double Mesh::grid_spacing() const {
  if (!structured()) throw ShapeMismatch("grid_spacing: mesh is not a native square mesh");
  return std::ldexp(2.0, -level);  // 2^(1-level)
}

double Mesh::element_diameter(int e) const {
  const auto& el = elements[e];
  const int n = nodes_per_element();
  double d = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      d = std::max(d, (nodes[el[i]] - nodes[el[j]]).norm());
  return d;
}

double Mesh::element_area(int e) const {
  const auto& el = elements[e];
  if (kind == CellKind::Triangle) {
    const Eigen::Vector2d u = nodes[el[1]] - nodes[el[0]];
    const Eigen::Vector2d v = nodes[el[2]] - nodes[el[0]];
    return 0.5 * (u.x() * v.y() - u.y() * v.x());
  }
  const Eigen::Vector2d u = nodes[el[2]] - nodes[el[0]];
  const Eigen::Vector2d v = nodes[el[3]] - nodes[el[1]];
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

std::pair<int, Eigen::Vector2d> Mesh::locate(const Eigen::Vector2d& x) const {
  if (!structured()) throw ShapeMismatch("locate: available for native square meshes only");
  const double tol = 1e-12;
  if (x.x() < -1 - tol || x.x() > 1 + tol || x.y() < -1 - tol || x.y() > 1 + tol)
    throw PointOutsideElement("locate: point outside (-1,1)^2");
  const int n = 1 << level;
  const double h = grid_spacing();
  auto cell_index = [&](double c) {
    int i = static_cast<int>(std::floor((c + 1.0) / h));
    return std::clamp(i, 0, n - 1);
  };
  const int i = cell_index(x.x());
  const int j = cell_index(x.y());
  const double x0 = -1.0 + i * h;
  const double y0 = -1.0 + j * h;
  const double u = std::clamp((x.x() - x0) / h, 0.0, 1.0);
  const double v = std::clamp((x.y() - y0) / h, 0.0, 1.0);
  if (kind == CellKind::Quad) return {j * n + i, Eigen::Vector2d(u, v)};
  // Lower triangle (v00,v10,v11) covers u >= v; upper (v00,v11,v01) the rest.
  const int cell = 2 * (j * n + i);
  if (u >= v) return {cell, Eigen::Vector2d(u - v, v)};
  return {cell + 1, Eigen::Vector2d(u, v - u)};
}

Mesh build_square_mesh(int level, CellKind kind) {
  if (level < 0) throw InvalidConfig("build_square_mesh: level must be >= 0");
  if (level > 14) throw InvalidConfig("build_square_mesh: level > 14 rejected");
  const int n = 1 << level;
  const double h = 2.0 / n;
  Mesh mesh;
  mesh.kind = kind;
  mesh.level = level;
  mesh.nodes.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.nodes.emplace_back(-1.0 + i * h, -1.0 + j * h);
  auto node = [&](int i, int j) { return j * (n + 1) + i; };

  if (kind == CellKind::Triangle) {
    mesh.elements.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int v00 = node(i, j), v10 = node(i + 1, j);
        const int v11 = node(i + 1, j + 1), v01 = node(i, j + 1);
        mesh.elements.push_back({v00, v10, v11, -1});
        mesh.elements.push_back({v00, v11, v01, -1});
      }
  } else {
    mesh.elements.reserve(n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        mesh.elements.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
  }

  auto cell = [&](int i, int j) {
    return kind == CellKind::Triangle ? 2 * (j * n + i) : j * n + i;
  };
  // Counterclockwise side enumeration; owning element is on the left.
  for (int i = 0; i < n; ++i)  // south, west to east
    mesh.boundary_edges.push_back({node(i, 0), node(i + 1, 0), cell(i, 0), 0, -1});
  for (int j = 0; j < n; ++j)  // east, south to north
    mesh.boundary_edges.push_back({node(n, j), node(n, j + 1), cell(n - 1, j), 1, -1});
  for (int i = n; i > 0; --i)  // north, east to west
    mesh.boundary_edges.push_back(
        {node(i, n), node(i - 1, n),
         kind == CellKind::Triangle ? cell(i - 1, n - 1) + 1 : cell(i - 1, n - 1), 2, -1});
  for (int j = n; j > 0; --j)  // west, north to south
    mesh.boundary_edges.push_back(
        {node(0, j), node(0, j - 1),
         kind == CellKind::Triangle ? cell(0, j - 1) + 1 : cell(0, j - 1), 3, -1});
  return mesh;
}

namespace {

/// Chain raw boundary edges into one counterclockwise loop.
std::vector<int> chain_boundary(const Mesh& mesh) {
  const auto& edges = mesh.boundary_edges;
  std::map<int, int> next_from_node;
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    if (next_from_node.count(edges[e].a))
      throw IoError("boundary is not a simple loop (node reused)");
    next_from_node[edges[e].a] = e;
  }
  std::vector<int> chain;
  chain.reserve(edges.size());
  int start = edges.front().a;
  int node = start;
  for (size_t k = 0; k < edges.size(); ++k) {
    auto it = next_from_node.find(node);
    if (it == next_from_node.end()) throw IoError("boundary loop is broken");
    chain.push_back(it->second);
    node = edges[it->second].b;
  }
  if (node != start || chain.size() != edges.size())
    throw IoError("boundary edges do not form a single closed loop");
  return chain;
}

BoundaryPartition build_partition(const Mesh& mesh, const std::vector<BoundaryTag>& edge_tags) {
  const auto& raw = mesh.boundary_edges;
  std::vector<int> chain = chain_boundary(mesh);
  const int ne = static_cast<int>(chain.size());

  // Group the chain into maximal straight same-tag runs (domain edges).
  auto dir = [&](int r) {
    const auto& e = raw[chain[r]];
    return (mesh.nodes[e.b] - mesh.nodes[e.a]).normalized();
  };
  auto same_run = [&](int r_prev, int r) {
    if (edge_tags[chain[r_prev]] != edge_tags[chain[r]]) return false;
    return (dir(r_prev) - dir(r)).norm() < 1e-9;
  };
  // Find a run break to anchor the grouping (a closed polygon always has one).
  int anchor = -1;
  for (int r = 0; r < ne; ++r)
    if (!same_run((r + ne - 1) % ne, r)) { anchor = r; break; }
  if (anchor < 0) throw IoError("boundary has no corner; not a polygon");

  std::vector<std::vector<int>> runs;  // chain positions per run
  for (int k = 0; k < ne; ++k) {
    const int r = (anchor + k) % ne;
    if (k == 0 || !same_run((r + ne - 1) % ne, r)) runs.emplace_back();
    runs.back().push_back(r);
  }

  BoundaryPartition part;

  // Pick the fixed edge: clamped run with lexicographically smallest midpoint.
  int fixed_run = -1;
  Eigen::Vector2d best(1e300, 1e300);
  for (int g = 0; g < static_cast<int>(runs.size()); ++g) {
    if (edge_tags[chain[runs[g].front()]] != BoundaryTag::Clamped) continue;
    const Eigen::Vector2d mid =
        0.5 * (mesh.nodes[raw[chain[runs[g].front()]].a] + mesh.nodes[raw[chain[runs[g].back()]].b]);
    if (mid.x() < best.x() - kGeomTol ||
        (std::abs(mid.x() - best.x()) < kGeomTol && mid.y() < best.y() - kGeomTol)) {
      best = mid;
      fixed_run = g;
    }
  }
  if (fixed_run < 0)
    throw NoClampedEdge("classify_boundary: at least one clamped edge is required");

  // Re-order runs so the fixed edge comes last; arclength starts at its
  // ccw-later endpoint x_B = gamma(0).
  const int nruns = static_cast<int>(runs.size());
  std::vector<int> run_order;
  for (int k = 1; k <= nruns; ++k) run_order.push_back((fixed_run + k) % nruns);

  double sigma = 0;
  for (int g : run_order) {
    DomainEdge de;
    de.tag = edge_tags[chain[runs[g].front()]];
    de.a = mesh.nodes[raw[chain[runs[g].front()]].a];
    de.b = mesh.nodes[raw[chain[runs[g].back()]].b];
    de.sigma_start = sigma;
    for (int r : runs[g]) {
      const auto& e = raw[chain[r]];
      MeshBoundaryEdge me;
      me.a = e.a;
      me.b = e.b;
      me.pa = mesh.nodes[e.a];
      me.pb = mesh.nodes[e.b];
      me.element = e.element;
      me.tag = de.tag;
      me.domain_edge = static_cast<int>(part.domain_edges.size());
      me.length = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
      me.tangent = (mesh.nodes[e.b] - mesh.nodes[e.a]) / me.length;
      me.normal = ccw_normal(me.tangent);
      me.sigma0 = sigma;
      sigma += me.length;
      de.mesh_edges.push_back(static_cast<int>(part.edges.size()));
      part.edges.push_back(me);
    }
    de.length = sigma - de.sigma_start;
    de.tangent = (de.b - de.a).normalized();
    de.normal = ccw_normal(de.tangent);
    part.domain_edges.push_back(de);
  }
  part.perimeter = sigma;
  part.fixed_edge = static_cast<int>(part.domain_edges.size()) - 1;
  part.sigma_fixed = part.domain_edges.back().sigma_start;

  // Corners: between consecutive domain edges (cyclically). Corner k sits at
  // the start of domain edge k.
  const int nd = static_cast<int>(part.domain_edges.size());
  for (int k = 0; k < nd; ++k) {
    Corner c;
    c.position = part.domain_edges[k].a;
    c.edge_in = (k + nd - 1) % nd;
    c.edge_out = k;
    c.free_free = part.domain_edges[c.edge_in].tag == BoundaryTag::Free &&
                  part.domain_edges[c.edge_out].tag == BoundaryTag::Free;
    part.corners.push_back(c);
    part.domain_edges[k].corner_start = k;
    part.domain_edges[(k + nd - 1) % nd].corner_end = k;
  }

  // Free components: maximal cyclic runs of free domain edges. The fixed
  // edge is clamped and parametrized last, so no run crosses the seam.
  for (int k = 0; k < nd; ++k) {
    if (part.domain_edges[k].tag != BoundaryTag::Free) continue;
    const int prev = (k + nd - 1) % nd;
    if (part.domain_edges[prev].tag == BoundaryTag::Free) continue;  // not a run head
    FreeComponent comp;
    int j = k;
    while (part.domain_edges[j].tag == BoundaryTag::Free) {
      comp.domain_edges.push_back(j);
      part.domain_edges[j].free_component = static_cast<int>(part.free_components.size());
      j = (j + 1) % nd;
      if (j == k) break;  // fully free boundary cannot occur (clamped edge exists)
    }
    part.free_components.push_back(std::move(comp));
  }

  // Same-tag runs meeting at angle pi were merged above; a tag change at a
  // straight boundary point is legal but unusual, so flag it.
  for (int k = 0; k < nd; ++k) {
    const auto& in = part.domain_edges[part.corners[k].edge_in];
    const auto& out = part.domain_edges[part.corners[k].edge_out];
    if (in.tag != out.tag && (in.tangent - out.tangent).norm() < 1e-9)
      part.warnings.push_back("tag change at a straight boundary point (" +
                              std::to_string(part.corners[k].position.x()) + "," +
                              std::to_string(part.corners[k].position.y()) + ")");
  }
  return part;
}

}  // namespace

std::vector<int> BoundaryPartition::free_free_corners() const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(corners.size()); ++k)
    if (corners[k].free_free) out.push_back(k);
  return out;
}

Eigen::Vector2d BoundaryPartition::point_at(double sigma) const {
  sigma = std::fmod(sigma, perimeter);
  if (sigma < 0) sigma += perimeter;
  // Binary search over edges by sigma0.
  int lo = 0, hi = static_cast<int>(edges.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (edges[mid].sigma0 <= sigma + kGeomTol) lo = mid;
    else hi = mid - 1;
  }
  const auto& e = edges[lo];
  return e.point((sigma - e.sigma0) / e.length);
}

BoundaryPartition classify_boundary(const Mesh& mesh, const SideTags& tags) {
  std::vector<BoundaryTag> edge_tags(mesh.boundary_edges.size());
  bool any_clamped = false;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const int side = mesh.boundary_edges[e].side;
    BoundaryTag t;
    switch (side) {
      case 0: t = tags.south; break;
      case 1: t = tags.east; break;
      case 2: t = tags.north; break;
      case 3: t = tags.west; break;
      default: throw ShapeMismatch("classify_boundary: mesh has untagged sides; use the loader overload");
    }
    edge_tags[e] = t;
    any_clamped = any_clamped || t == BoundaryTag::Clamped;
  }
  if (!any_clamped)
    throw NoClampedEdge("classify_boundary: at least one side must be clamped");
  return build_partition(mesh, edge_tags);
}

BoundaryPartition classify_boundary(const Mesh& mesh) {
  std::vector<BoundaryTag> edge_tags(mesh.boundary_edges.size());
  bool any_clamped = false;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const int t = mesh.boundary_edges[e].tag;
    if (t < 0) throw IoError("classify_boundary: mesh carries no boundary tags");
    edge_tags[e] = static_cast<BoundaryTag>(t);
    any_clamped = any_clamped || edge_tags[e] == BoundaryTag::Clamped;
  }
  if (!any_clamped)
    throw NoClampedEdge("classify_boundary: mesh has no clamped boundary edge");
  return build_partition(mesh, edge_tags);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  int nn = 0, nel = 0, nb = 0;
  std::string k1, k2, k3;
  if (!(in >> k1 >> nn >> k2 >> nel >> k3 >> nb) || k1 != "nodes" || k2 != "elements" || k3 != "boundary")
    throw IoError("bad mesh header; expected 'nodes N elements M boundary B'");
  Mesh mesh;
  mesh.level = -1;
  mesh.nodes.resize(nn);
  for (int i = 0; i < nn; ++i)
    if (!(in >> mesh.nodes[i].x() >> mesh.nodes[i].y())) throw IoError("truncated node list");

  std::string line;
  std::getline(in, line);
  mesh.elements.reserve(nel);
  int npe = 0;
  for (int e = 0; e < nel; ++e) {
    do {
      if (!std::getline(in, line)) throw IoError("truncated element list");
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    std::istringstream ls(line);
    std::array<int, 4> el = {-1, -1, -1, -1};
    int count = 0;
    int v;
    while (ls >> v && count < 4) el[count++] = v;
    if (count != 3 && count != 4) throw IoError("elements must list 3 or 4 node indices");
    if (npe == 0) npe = count;
    if (count != npe) throw IoError("mixed element kinds are not supported");
    mesh.elements.push_back(el);
  }
  mesh.kind = npe == 3 ? CellKind::Triangle : CellKind::Quad;
  // Enforce counterclockwise node order.
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.element_area(e) < 0) {
      auto& el = mesh.elements[e];
      if (npe == 3) std::swap(el[1], el[2]);
      else std::swap(el[1], el[3]);
    }
    if (mesh.element_area(e) <= 0) throw IoError("degenerate element in mesh file");
  }

  // Boundary edges: orient each so its owner element lies on the left.
  std::map<std::pair<int, int>, int> owner;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < npe; ++k) {
      const int a = el[k], b = el[(k + 1) % npe];
      owner[{a, b}] = e;
    }
  }
  mesh.boundary_edges.reserve(nb);
  for (int k = 0; k < nb; ++k) {
    int i, j;
    std::string t;
    if (!(in >> i >> j >> t) || t.empty()) throw IoError("truncated boundary list");
    RawBoundaryEdge be;
    auto it = owner.find({i, j});
    if (it == owner.end()) {
      it = owner.find({j, i});
      if (it == owner.end()) throw IoError("boundary edge not found in any element");
      std::swap(i, j);
    }
    be.a = i;
    be.b = j;
    be.element = it->second;
    be.tag = static_cast<int>(tag_from_letter(t[0]));
    // An interior edge would also appear reversed in a second element.
    if (owner.count({j, i})) throw IoError("tagged edge is interior (owned by two elements)");
    mesh.boundary_edges.push_back(be);
  }
  return mesh;
}

void save_mesh(const Mesh& mesh, const BoundaryPartition& partition, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file: " + path);
  out.precision(17);
  out << "nodes " << mesh.num_nodes() << " elements " << mesh.num_elements() << " boundary "
      << partition.edges.size() << "\n";
  for (const auto& x : mesh.nodes) out << x.x() << " " << x.y() << "\n";
  const int npe = mesh.nodes_per_element();
  for (const auto& el : mesh.elements) {
    for (int k = 0; k < npe; ++k) out << el[k] << (k + 1 < npe ? " " : "\n");
  }
  for (const auto& e : partition.edges)
    out << e.a << " " << e.b << " " << tag_letter(e.tag) << "\n";
  if (!out) throw IoError("failed writing mesh file: " + path);
}

}  // namespace plate
