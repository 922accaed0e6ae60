#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "parest/errors.hpp"
#include "parest/mesh.hpp"

using namespace parest;

TEST(Mesh, CountsPerLevel) {
  for (int l = 0; l <= 5; ++l) {
    const MeshPtr m = uniform_square_mesh(l);
    const int n = 1 << l;
    EXPECT_EQ(m->num_triangles(), 2 * n * n);
    EXPECT_EQ(m->num_vertices(), (n + 1) * (n + 1));
    EXPECT_EQ(m->num_vertices() - m->num_edges() + m->num_triangles(), 1);
    EXPECT_EQ(m->level(), l);
    EXPECT_NEAR(m->total_area(), 4.0, 1e-13);
  }
}

TEST(Mesh, TrianglesAreCounterclockwise) {
  const MeshPtr m = uniform_square_mesh(3);
  for (int k = 0; k < m->num_triangles(); ++k) EXPECT_GT(m->signed_area(k), 0.0);
}

TEST(Mesh, EdgeTopology) {
  const MeshPtr m = uniform_square_mesh(2);
  int boundary = 0;
  for (const Edge& e : m->edges()) {
    EXPECT_GE(e.left, 0);
    if (!e.interior()) {
      ++boundary;
      EXPECT_TRUE(m->is_boundary_vertex(e.vertices[0]));
      EXPECT_TRUE(m->is_boundary_vertex(e.vertices[1]));
    }
  }
  EXPECT_EQ(boundary, 16);
  EXPECT_EQ(static_cast<int>(m->interior_edges().size()), m->num_edges() - boundary);
  // Local edge i joins local vertices i and i+1.
  for (int k = 0; k < m->num_triangles(); ++k)
    for (int i = 0; i < 3; ++i) {
      const Edge& e = m->edge(m->triangle_edges(k)[i]);
      const int a = m->triangle(k)[i];
      const int b = m->triangle(k)[(i + 1) % 3];
      EXPECT_TRUE((e.vertices[0] == a && e.vertices[1] == b) || (e.vertices[0] == b && e.vertices[1] == a));
    }
}

TEST(Mesh, SizeHalvesPerLevel) {
  double h = mesh_size_max(*uniform_square_mesh(0));
  EXPECT_NEAR(h, 2 * std::sqrt(2.0), 1e-14);
  for (int l = 1; l <= 5; ++l) {
    const double hl = mesh_size_max(*uniform_square_mesh(l));
    EXPECT_NEAR(hl, h / 2, 1e-14);
    h = hl;
  }
}

TEST(Mesh, GeometryMapsReferenceVertices) {
  const MeshPtr m = uniform_square_mesh(2);
  for (int k = 0; k < m->num_triangles(); ++k) {
    const ElementGeometry g = m->geometry(k);
    EXPECT_LE((g.map(Point(0, 0)) - m->vertex(m->triangle(k)[0])).norm(), 1e-14);
    EXPECT_LE((g.map(Point(1, 0)) - m->vertex(m->triangle(k)[1])).norm(), 1e-14);
    EXPECT_LE((g.map(Point(0, 1)) - m->vertex(m->triangle(k)[2])).norm(), 1e-14);
    EXPECT_NEAR(g.area(), m->signed_area(k), 1e-15);
    EXPECT_LE((g.pullback(g.map(Point(0.2, 0.3))) - Point(0.2, 0.3)).norm(), 1e-14);
  }
}

TEST(Mesh, LevelGuards) {
  EXPECT_THROW(uniform_square_mesh(-1), DomainError);
  EXPECT_THROW(uniform_square_mesh(kMaxMeshLevel + 1), CapacityError);
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(TriangleMesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {{0, 2, 1}}, 0), DomainError);
  EXPECT_THROW(TriangleMesh({Point(0, 0), Point(1, 0)}, {{0, 1, 2}}, 0), DomainError);
  EXPECT_THROW(TriangleMesh({Point(0, 0)}, {}, 0), DomainError);
}

TEST(Mesh, PointLocatorFindsCentroids) {
  const MeshPtr m = uniform_square_mesh(4);
  const PointLocator loc(*m);
  for (int k = 0; k < m->num_triangles(); ++k) {
    const auto& t = m->triangle(k);
    const Point c = (m->vertex(t[0]) + m->vertex(t[1]) + m->vertex(t[2])) / 3.0;
    EXPECT_EQ(loc.locate(c), k);
  }
  EXPECT_EQ(loc.locate(Point(2, 0)), -1);
  EXPECT_GE(loc.locate(Point(1, 1)), 0);
}

TEST(Mesh, CommonRefinementOfNestedLevels) {
  const MeshPtr coarse = uniform_square_mesh(1);
  const MeshPtr fine = uniform_square_mesh(3);
  const CommonRefinement cr(coarse, fine);
  EXPECT_EQ(&cr.fine(), fine.get());
  EXPECT_EQ(&cr.coarse(), coarse.get());
  EXPECT_FALSE(cr.identical());
  std::vector<double> area(coarse->num_triangles(), 0.0);
  for (int k = 0; k < fine->num_triangles(); ++k) {
    const int c = cr.coarse_element(k);
    ASSERT_GE(c, 0);
    EXPECT_EQ(cr.element_in(*coarse, k), c);
    EXPECT_EQ(cr.element_in(*fine, k), k);
    area[c] += fine->signed_area(k);
  }
  for (int c = 0; c < coarse->num_triangles(); ++c) EXPECT_NEAR(area[c], coarse->signed_area(c), 1e-14);
  // Coarse interior edges are covered by fine edges of total equal length.
  std::vector<double> len(coarse->num_edges(), 0.0);
  for (int e = 0; e < fine->num_edges(); ++e)
    if (cr.coarse_edge(e) >= 0) len[cr.coarse_edge(e)] += fine->edge_length(e);
  for (int e : coarse->interior_edges()) EXPECT_NEAR(len[e], coarse->edge_length(e), 1e-14);
}

TEST(Mesh, CommonRefinementIsCached) {
  const MeshPtr a = uniform_square_mesh(1);
  const MeshPtr b = uniform_square_mesh(2);
  EXPECT_EQ(common_refinement(a, b).get(), common_refinement(a, b).get());
  EXPECT_TRUE(common_refinement(a, a)->identical());
}

TEST(Mesh, NonNestedMeshesAreRejected) {
  // Same square, opposite diagonal.
  const auto other = std::make_shared<const TriangleMesh>(
      std::vector<Point>{Point(-1, -1), Point(1, -1), Point(1, 1), Point(-1, 1)},
      std::vector<std::array<int, 3>>{{0, 1, 3}, {1, 2, 3}}, 0);
  EXPECT_THROW(CommonRefinement(uniform_square_mesh(1), other), IncompatibleMeshError);
  const auto shifted = std::make_shared<const TriangleMesh>(
      std::vector<Point>{Point(0, 0), Point(3, 0), Point(0, 3)}, std::vector<std::array<int, 3>>{{0, 1, 2}}, 0);
  EXPECT_THROW(CommonRefinement(uniform_square_mesh(1), shifted), IncompatibleMeshError);
}

TEST(Mesh, EdgeSetsOfIdenticalMeshes) {
  const MeshPtr m = uniform_square_mesh(2);
  const EdgeSets s = interior_edge_sets(m, m);
  EXPECT_EQ(s.sigma.size(), m->interior_edges().size());
  EXPECT_EQ(s.sigma_hat.size(), m->interior_edges().size());
  EXPECT_TRUE(s.sigma_check_minus_hat.empty());
}

TEST(Mesh, EdgeSetsAreSymmetricInLength) {
  const MeshPtr a = uniform_square_mesh(1);
  const MeshPtr b = uniform_square_mesh(3);
  const EdgeSets up = interior_edge_sets(b, a);
  const EdgeSets down = interior_edge_sets(a, b);
  EXPECT_NEAR(total_length(up.sigma_hat), total_length(down.sigma_hat), 1e-13);
  EXPECT_NEAR(total_length(up.sigma_check_minus_hat), total_length(down.sigma_check_minus_hat), 1e-13);
}

TEST(Mesh, WriteReadRoundTrip) {
  const MeshPtr m = uniform_square_mesh(2);
  std::stringstream s;
  write_mesh(s, *m);
  const MeshPtr r = read_mesh(s, 2);
  ASSERT_EQ(r->num_vertices(), m->num_vertices());
  ASSERT_EQ(r->num_triangles(), m->num_triangles());
  for (int v = 0; v < m->num_vertices(); ++v) EXPECT_EQ(r->vertex(v), m->vertex(v));
  for (int k = 0; k < m->num_triangles(); ++k) EXPECT_EQ(r->triangle(k), m->triangle(k));
  std::stringstream bad("q 1 2\n");
  EXPECT_THROW(read_mesh(bad), DomainError);
}
