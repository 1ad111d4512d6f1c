// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "plate/geometry.hpp"

namespace plate {
namespace {

TEST(SquareMesh, CoarsestQuadGrid) {
  const Mesh mesh = build_square_mesh(0, CellKind::Quad);
  EXPECT_EQ(mesh.num_elements(), 1);
  EXPECT_EQ(mesh.num_nodes(), 4);
  EXPECT_EQ(mesh.boundary_edges.size(), 4u);
}

TEST(SquareMesh, LevelTwoTriangles) {
  const Mesh mesh = build_square_mesh(2, CellKind::Triangle);
  EXPECT_EQ(mesh.num_elements(), 32);
  EXPECT_EQ(mesh.num_nodes(), 25);
}

TEST(SquareMesh, BoundaryEdgeCountByConstruction) {
  for (int level = 0; level <= 5; ++level) {
    const Mesh mesh = build_square_mesh(level, CellKind::Quad);
    EXPECT_EQ(static_cast<int>(mesh.boundary_edges.size()), 4 * (1 << level)) << level;
  }
}

TEST(SquareMesh, RefinementHalvesSpacing) {
  for (int level = 0; level < 6; ++level) {
    EXPECT_DOUBLE_EQ(build_square_mesh(level + 1, CellKind::Triangle).grid_spacing(),
                     build_square_mesh(level, CellKind::Triangle).grid_spacing() / 2);
  }
}

TEST(SquareMesh, PositiveAreasAndOwnership) {
  const Mesh mesh = build_square_mesh(3, CellKind::Triangle);
  for (int e = 0; e < mesh.num_elements(); ++e) EXPECT_GT(mesh.element_area(e), 0.0);
  for (const auto& be : mesh.boundary_edges) {
    // the owner element contains both endpoints
    const auto& el = mesh.elements[be.element];
    int hits = 0;
    for (int v = 0; v < mesh.nodes_per_element(); ++v)
      hits += (el[v] == be.a) + (el[v] == be.b);
    EXPECT_EQ(hits, 2);
  }
}

TEST(SquareMesh, RejectsExcessiveLevel) {
  EXPECT_THROW(build_square_mesh(15, CellKind::Triangle), InvalidConfig);
}

TEST(Classify, BenchmarkLayout) {
  const Mesh mesh = build_square_mesh(3, CellKind::Triangle);
  const BoundaryPartition part = classify_boundary(mesh, SideTags{});
  EXPECT_TRUE(part.free_free_corners().empty());
  EXPECT_EQ(part.free_components.size(), 1u);
  ASSERT_EQ(part.domain_edges.size(), 4u);
  // fixed edge is the clamped west side
  const DomainEdge& fixed = part.domain_edges[part.fixed_edge];
  EXPECT_EQ(fixed.tag, BoundaryTag::Clamped);
  EXPECT_NEAR(fixed.a.x(), -1.0, 1e-14);
  EXPECT_NEAR(fixed.b.x(), -1.0, 1e-14);
  // gamma(0) = x_B, the ccw-later endpoint of the west side
  EXPECT_NEAR((part.point_at(0.0) - Eigen::Vector2d(-1, -1)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(part.sigma_fixed, 6.0, 1e-13);
}

TEST(Classify, PerimeterAtEveryLevel) {
  for (int level = 0; level <= 6; ++level) {
    const Mesh mesh = build_square_mesh(level, CellKind::Triangle);
    const BoundaryPartition part = classify_boundary(mesh, SideTags{});
    double total = 0;
    for (const auto& e : part.edges) total += e.length;
    EXPECT_NEAR(total, 8.0, 1e-12) << level;
    EXPECT_NEAR(part.perimeter, 8.0, 1e-12);
  }
}

TEST(Classify, ArclengthTraversesBoundary) {
  const Mesh mesh = build_square_mesh(2, CellKind::Triangle);
  const BoundaryPartition part = classify_boundary(mesh, SideTags{});
  // sigma runs ccw through south, east, north, then the fixed west side
  EXPECT_NEAR((part.point_at(2.0) - Eigen::Vector2d(1, -1)).norm(), 0, 1e-13);
  EXPECT_NEAR((part.point_at(4.0) - Eigen::Vector2d(1, 1)).norm(), 0, 1e-13);
  EXPECT_NEAR((part.point_at(6.0) - Eigen::Vector2d(-1, 1)).norm(), 0, 1e-13);
  EXPECT_NEAR((part.point_at(7.0) - Eigen::Vector2d(-1, 0)).norm(), 0, 1e-13);
  // strictly increasing edge offsets cover [0, 8)
  for (size_t e = 1; e < part.edges.size(); ++e)
    EXPECT_GT(part.edges[e].sigma0, part.edges[e - 1].sigma0);
}

TEST(Classify, AllClamped) {
  const Mesh mesh = build_square_mesh(2, CellKind::Triangle);
  const SideTags tags{BoundaryTag::Clamped, BoundaryTag::Clamped, BoundaryTag::Clamped,
                      BoundaryTag::Clamped};
  const BoundaryPartition part = classify_boundary(mesh, tags);
  EXPECT_TRUE(part.free_components.empty());
  EXPECT_TRUE(part.free_free_corners().empty());
  for (const auto& d : part.domain_edges) EXPECT_EQ(d.tag, BoundaryTag::Clamped);
}

TEST(Classify, AdjacentFreeSidesShareCorner) {
  const Mesh mesh = build_square_mesh(2, CellKind::Triangle);
  SideTags tags;
  tags.west = BoundaryTag::Clamped;
  tags.north = BoundaryTag::Free;
  tags.east = BoundaryTag::Free;
  tags.south = BoundaryTag::SimplySupported;
  const BoundaryPartition part = classify_boundary(mesh, tags);
  const auto vf = part.free_free_corners();
  ASSERT_EQ(vf.size(), 1u);
  // enumerate corners: the only corner with two adjacent free edges is (1,1)
  EXPECT_NEAR((part.corners[vf[0]].position - Eigen::Vector2d(1, 1)).norm(), 0, 1e-14);
  EXPECT_EQ(part.free_components.size(), 1u);
  EXPECT_EQ(part.free_components[0].domain_edges.size(), 2u);
}

TEST(Classify, NoClampedEdgeRejected) {
  const Mesh mesh = build_square_mesh(1, CellKind::Triangle);
  SideTags tags{BoundaryTag::SimplySupported, BoundaryTag::SimplySupported, BoundaryTag::Free,
                BoundaryTag::SimplySupported};
  EXPECT_THROW(classify_boundary(mesh, tags), NoClampedEdge);
}

TEST(Classify, BoundaryEdgeCountScalesWithMeshSize) {
  // |edges on Gamma_s u Gamma_f| <= c / h with a level-independent c.
  for (int level = 1; level <= 5; ++level) {
    const Mesh mesh = build_square_mesh(level, CellKind::Triangle);
    const BoundaryPartition part = classify_boundary(mesh, SideTags{});
    int count = 0;
    for (const auto& e : part.edges) count += e.tag != BoundaryTag::Clamped;
    EXPECT_LE(count, static_cast<int>(6.0 / mesh.grid_spacing()) + 1) << level;
  }
}

TEST(MeshIo, RoundTrip) {
  const Mesh mesh = build_square_mesh(2, CellKind::Triangle);
  const BoundaryPartition part = classify_boundary(mesh, SideTags{});
  const std::string path = testing::TempDir() + "plate_mesh_roundtrip.txt";
  save_mesh(mesh, part, path);
  const Mesh loaded = load_mesh(path);
  EXPECT_EQ(loaded.num_nodes(), mesh.num_nodes());
  EXPECT_EQ(loaded.num_elements(), mesh.num_elements());
  EXPECT_EQ(loaded.boundary_edges.size(), part.edges.size());
  const BoundaryPartition part2 = classify_boundary(loaded);
  EXPECT_EQ(part2.domain_edges.size(), part.domain_edges.size());
  EXPECT_EQ(part2.free_components.size(), part.free_components.size());
  EXPECT_NEAR(part2.perimeter, 8.0, 1e-12);
  // same fixed edge (west) after reload
  EXPECT_NEAR(part2.domain_edges[part2.fixed_edge].a.x(), -1.0, 1e-14);
  std::remove(path.c_str());
}

TEST(MeshIo, LoaderRejectsGarbage) {
  const std::string path = testing::TempDir() + "plate_mesh_bad.txt";
  {
    std::ofstream f(path);
    f << "vertices 3 cells 1\n";
  }
  EXPECT_THROW(load_mesh(path), IoError);
  std::remove(path.c_str());
}

TEST(Locate, StructuredLookup) {
  const Mesh mesh = build_square_mesh(3, CellKind::Triangle);
  const auto [e, ref] = mesh.locate({0.3, -0.7});
  EXPECT_GE(e, 0);
  EXPECT_LT(e, mesh.num_elements());
  // reference coordinates reproduce the physical point
  const auto& el = mesh.elements[e];
  const Eigen::Vector2d x = mesh.nodes[el[0]] + ref.x() * (mesh.nodes[el[1]] - mesh.nodes[el[0]]) +
                            ref.y() * (mesh.nodes[el[2]] - mesh.nodes[el[0]]);
  EXPECT_NEAR((x - Eigen::Vector2d(0.3, -0.7)).norm(), 0, 1e-13);
  EXPECT_THROW(mesh.locate({1.5, 0.0}), PointOutsideElement);
}

}  // namespace
}  // namespace plate
