#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace parest {

using Point = Eigen::Vector2d;

/// One mesh edge. `right` is -1 for edges on the domain boundary.
struct Edge {
  std::array<int, 2> vertices;
  int left = -1;
  int right = -1;

  bool interior() const { return right >= 0; }
};

/// Affine map x = origin + jacobian * xi from the reference triangle
/// (0,0), (1,0), (0,1).
struct ElementGeometry {
  Point origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse;
  double det = 0.0;

  Point map(const Point& xi) const { return origin + jacobian * xi; }
  Point pullback(const Point& x) const { return inverse * (x - origin); }
  double area() const { return 0.5 * det; }
};

/// Conforming triangulation. Immutable after construction.
///
/// Local edge i of triangle k joins vertices i and (i+1)%3 of that triangle.
class TriangleMesh {
 public:
  TriangleMesh(std::vector<Point> vertices,
               std::vector<std::array<int, 3>> triangles, int level);

  int level() const { return level_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::array<int, 3>& triangle(int k) const { return triangles_[k]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  /// Indices into edges() of the interior edges, ascending.
  const std::vector<int>& interior_edges() const { return interior_edges_; }
  const std::array<int, 3>& triangle_edges(int k) const { return triangle_edges_[k]; }
  const std::vector<bool>& boundary_vertex_flags() const { return boundary_vertex_; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }

  /// Per-triangle diameter (longest side); this is the meshsize function h.
  const std::vector<double>& element_diameters() const { return diameters_; }
  double diameter(int k) const { return diameters_[k]; }
  double edge_length(int e) const;
  ElementGeometry geometry(int k) const;
  double signed_area(int k) const;
  double total_area() const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<int> interior_edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<bool> boundary_vertex_;
  std::vector<double> diameters_;
  int level_ = 0;
};

using MeshPtr = std::shared_ptr<const TriangleMesh>;

constexpr int kMaxMeshLevel = 12;

/// Uniform mesh of [-1,1]^2: the square cut by the diagonal (-1,-1)-(1,1),
/// followed by `level` red refinements.
MeshPtr uniform_square_mesh(int level);

/// Regular 1->4 refinement through edge midpoints.
MeshPtr refine_red(const TriangleMesh& mesh);

/// Largest element diameter.
double mesh_size_max(const TriangleMesh& mesh);

/// Bucket-grid point location.
class PointLocator {
 public:
  explicit PointLocator(const TriangleMesh& mesh);

  /// Triangle containing x (boundary inclusive, relative tolerance tol), or -1.
  int locate(const Point& x, double tol = 1e-10) const;

 private:
  const TriangleMesh* mesh_;
  Point lower_;
  double cell_ = 1.0;
  int cells_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Pairing of two nested meshes through the finer one.
///
/// Every fine triangle lies in exactly one coarse triangle, and every fine
/// interior edge either lies on a coarse interior edge or crosses the
/// interior of a coarse triangle.
class CommonRefinement {
 public:
  /// Throws IncompatibleMeshError when the meshes are not nested.
  CommonRefinement(MeshPtr a, MeshPtr b);

  const TriangleMesh& fine() const { return *fine_; }
  const TriangleMesh& coarse() const { return *coarse_; }
  const MeshPtr& fine_ptr() const { return fine_; }
  const MeshPtr& coarse_ptr() const { return coarse_; }
  bool identical() const { return identical_; }

  /// Whether `mesh` is the fine side (true also when identical).
  bool is_fine(const TriangleMesh& mesh) const;

  /// Triangle of `mesh` (one of the pair) containing fine triangle k.
  int element_in(const TriangleMesh& mesh, int fine_triangle) const;
  /// Edge of `mesh` containing fine edge e, or -1 when e crosses the
  /// interior of one of its triangles.
  int edge_in(const TriangleMesh& mesh, int fine_edge) const;

  int coarse_element(int fine_triangle) const { return coarse_of_fine_[fine_triangle]; }
  int coarse_edge(int fine_edge) const { return coarse_edge_of_fine_[fine_edge]; }

 private:
  MeshPtr fine_;
  MeshPtr coarse_;
  bool identical_ = false;
  std::vector<int> coarse_of_fine_;
  std::vector<int> coarse_edge_of_fine_;
};

/// Cached construction of common refinements, keyed on mesh identity.
std::shared_ptr<const CommonRefinement> common_refinement(const MeshPtr& a,
                                                          const MeshPtr& b);

struct Segment {
  Point a;
  Point b;

  double length() const { return (b - a).norm(); }
};

/// Interior skeletons of two consecutive meshes, as fine-mesh segments.
struct EdgeSets {
  std::vector<Segment> sigma;                   // interior edges of the current mesh
  std::vector<Segment> sigma_hat;               // on both interior skeletons
  std::vector<Segment> sigma_check_minus_hat;   // on exactly one of them
};

double total_length(const std::vector<Segment>& segments);

EdgeSets interior_edge_sets(const MeshPtr& current, const MeshPtr& previous);

/// Plain-text dump: `v x y` per vertex, `t i j k` per triangle (0-based).
void write_mesh(std::ostream& out, const TriangleMesh& mesh);
MeshPtr read_mesh(std::istream& in, int level = 0);

}  // namespace parest
