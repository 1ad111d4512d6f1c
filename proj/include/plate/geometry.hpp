// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_GEOMETRY_HPP
#define PLATE_GEOMETRY_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plate/errors.hpp"

namespace plate {

enum class BoundaryTag : int { Clamped = 0, SimplySupported = 1, Free = 2 };
enum class CellKind { Triangle, Quad };

char tag_letter(BoundaryTag tag);
BoundaryTag tag_from_letter(char c);

/// Raw boundary mesh edge. Node order (a,b) is counterclockwise along the
/// boundary, i.e. the owning element lies to the left.
struct RawBoundaryEdge {
  int a = -1, b = -1;
  int element = -1;
  int side = -1;  ///< 0 south, 1 east, 2 north, 3 west (native meshes only)
  int tag = -1;   ///< BoundaryTag value from a mesh file, -1 if untagged
};

struct Mesh {
  CellKind kind = CellKind::Triangle;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 4>> elements;  ///< [3] == -1 for triangles
  std::vector<RawBoundaryEdge> boundary_edges;
  int level = -1;  ///< uniform refinement count; -1 for loaded meshes

  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int nodes_per_element() const { return kind == CellKind::Triangle ? 3 : 4; }
  bool structured() const { return level >= 0; }

  /// Grid spacing h = 2^(1-level) of the native square mesh.
  double grid_spacing() const;
  double element_diameter(int e) const;
  double element_area(int e) const;

  /// Locate the element containing `x` on a native square mesh and return
  /// its reference coordinates. Throws PointOutsideElement if `x` is not in
  /// the closed domain, ShapeMismatch for loaded meshes.
  std::pair<int, Eigen::Vector2d> locate(const Eigen::Vector2d& x) const;
};

/// Uniform 2^level x 2^level grid on (-1,1)^2; cells split into two
/// triangles (diagonal from the lower-left corner) when kind == Triangle.
Mesh build_square_mesh(int level, CellKind kind);

/// Requested condition per side of the square, in geographic order.
struct SideTags {
  BoundaryTag west = BoundaryTag::Clamped;
  BoundaryTag north = BoundaryTag::SimplySupported;
  BoundaryTag east = BoundaryTag::Free;
  BoundaryTag south = BoundaryTag::SimplySupported;
};

/// Maximal straight run of boundary with a single condition type.
struct DomainEdge {
  BoundaryTag tag = BoundaryTag::Clamped;
  Eigen::Vector2d a, b;  ///< endpoints, counterclockwise
  Eigen::Vector2d normal, tangent;
  double length = 0;
  double sigma_start = 0;
  std::vector<int> mesh_edges;  ///< indices into BoundaryPartition::edges
  int free_component = -1;
  int corner_start = -1, corner_end = -1;
};

struct Corner {
  Eigen::Vector2d position;
  int edge_in = -1, edge_out = -1;  ///< domain edges meeting here (ccw order)
  bool free_free = false;           ///< member of the corner set V_f
};

struct MeshBoundaryEdge {
  int a = -1, b = -1;  ///< node ids, counterclockwise
  int element = -1;
  int domain_edge = -1;
  BoundaryTag tag = BoundaryTag::Clamped;
  double sigma0 = 0, length = 0;
  Eigen::Vector2d pa, pb;  ///< endpoint coordinates
  Eigen::Vector2d normal, tangent;

  Eigen::Vector2d point(double u) const { return (1 - u) * pa + u * pb; }
};

struct FreeComponent {
  std::vector<int> domain_edges;  ///< ccw-consecutive run of free edges
};

/// Classified boundary: tagged mesh edges in counterclockwise arclength
/// order starting at gamma(0) = x_B, the ccw-later endpoint of the fixed
/// clamped edge E (which is parametrized last).
struct BoundaryPartition {
  std::vector<MeshBoundaryEdge> edges;
  std::vector<DomainEdge> domain_edges;
  std::vector<Corner> corners;
  std::vector<FreeComponent> free_components;
  int fixed_edge = -1;
  double perimeter = 0;
  double sigma_fixed = 0;  ///< arclength where the fixed edge begins
  std::vector<std::string> warnings;

  std::vector<int> free_free_corners() const;
  Eigen::Vector2d point_at(double sigma) const;
  bool on_fixed_edge(int mesh_edge) const {
    return edges[mesh_edge].domain_edge == fixed_edge;
  }
};

/// Tag the native square mesh side-by-side. Throws NoClampedEdge when no
/// side is clamped.
BoundaryPartition classify_boundary(const Mesh& mesh, const SideTags& tags);

/// Classification from per-edge tags carried by a loaded mesh.
BoundaryPartition classify_boundary(const Mesh& mesh);

/// Plain-text mesh I/O; see README for the format.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const BoundaryPartition& partition,
               const std::string& path);

}  // namespace plate

#endif
