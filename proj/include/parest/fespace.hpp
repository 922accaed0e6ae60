#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "parest/linalg.hpp"
#include "parest/mesh.hpp"

namespace parest {

using SpatialFunction = std::function<double(const Point&)>;

/// Lagrange P_l basis on the reference triangle (0,0), (1,0), (0,1).
///
/// Node order: the three vertices, then l-1 nodes on each local edge
/// (0->1, 1->2, 2->0, in edge direction), then interior lattice nodes.
class ReferenceElement {
 public:
  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Point>& nodes() const { return nodes_; }

  void values(const Point& xi, Eigen::Ref<Eigen::VectorXd> out) const;
  /// Row i holds the reference gradient of basis function i.
  void gradients(const Point& xi, Eigen::Ref<Eigen::MatrixX2d> out) const;
  void hessians(const Point& xi, std::vector<Eigen::Matrix2d>& out) const;

 private:
  int degree_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd coefficients_;  // row i: monomial coefficients of basis i
};

/// Constant symmetric positive-definite diffusion matrix A with its
/// coercivity (alpha) and continuity (beta) constants.
struct DiffusionMatrix {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Identity();
  double alpha = 1.0;
  double beta = 1.0;

  static DiffusionMatrix identity() { return {}; }
  /// Throws DomainError unless A is symmetric positive definite.
  static DiffusionMatrix from_matrix(const Eigen::Matrix2d& a);
};

/// Continuous P_l finite element space on a triangle mesh, optionally with
/// homogeneous Dirichlet conditions eliminated from the unknowns.
class FeSpace {
 public:
  FeSpace(MeshPtr mesh, int degree, bool homogeneous_dirichlet = true,
          SolverOptions solver = {});

  FeSpace(const FeSpace&) = delete;
  FeSpace& operator=(const FeSpace&) = delete;

  const TriangleMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return reference_.degree(); }
  const ReferenceElement& reference() const { return reference_; }
  bool homogeneous_dirichlet() const { return dirichlet_; }
  const SolverOptions& solver_options() const { return solver_; }

  int num_dofs() const { return num_dofs_; }
  int num_nodes() const { return static_cast<int>(node_coords_.size()); }
  int dofs_per_element() const { return reference_.num_nodes(); }

  /// Global dof of each local node; -1 for constrained (boundary) nodes.
  std::span<const int> element_dofs(int k) const;
  std::span<const int> element_nodes(int k) const;
  const Point& node_coordinate(int node) const { return node_coords_[node]; }
  bool is_boundary_node(int node) const { return boundary_node_[node]; }
  int node_of_dof(int dof) const { return dof_nodes_[dof]; }
  /// Dofs lying on the boundary (empty when boundary nodes are eliminated).
  std::vector<int> boundary_dofs() const;

  /// Cached mass matrix and its solver.
  const SparseOperator& mass() const;
  const LinearSolver& mass_solver() const;

 private:
  void build_caches() const;

  MeshPtr mesh_;
  ReferenceElement reference_;
  bool dirichlet_;
  SolverOptions solver_;
  int num_dofs_ = 0;
  std::vector<int> element_nodes_;
  std::vector<int> element_dofs_;
  std::vector<Point> node_coords_;
  std::vector<bool> boundary_node_;
  std::vector<int> dof_nodes_;

  mutable std::once_flag cache_once_;
  mutable std::unique_ptr<SparseOperator> mass_;
  mutable std::unique_ptr<LinearSolver> mass_solver_;
};

using SpacePtr = std::shared_ptr<const FeSpace>;

SpacePtr make_space(MeshPtr mesh, int degree = 1, bool homogeneous_dirichlet = true,
                    SolverOptions solver = {});

/// Coefficients of a finite element function.
struct DofVector {
  SpacePtr space;
  Vector coefficients;

  DofVector() = default;
  explicit DofVector(SpacePtr s);
  DofVector(SpacePtr s, Vector c);

  int size() const { return static_cast<int>(coefficients.size()); }
  /// Value at reference point xi of triangle k.
  double value(int k, const Point& xi) const;
  /// Physical gradient at reference point xi of triangle k.
  Point gradient(int k, const Point& xi) const;
  /// Physical Hessian at reference point xi of triangle k.
  Eigen::Matrix2d hessian(int k, const Point& xi) const;
  /// Local coefficients on triangle k (zero for constrained nodes).
  Eigen::VectorXd local(int k) const;
};

SparseOperator assemble_mass(const FeSpace& space);
SparseOperator assemble_stiffness(const FeSpace& space, const DiffusionMatrix& diffusion);
/// Load vector (f, phi_i) with a rule of the given degree.
Vector assemble_load(const FeSpace& space, const SpatialFunction& f, int quadrature_degree);

/// (v, phi_i) for every basis function of `target`, exact for nested meshes.
Vector mass_pairing(const DofVector& v, const FeSpace& target);

DofVector l2_project(const SpatialFunction& source, const SpacePtr& target,
                     int quadrature_degree);
DofVector l2_project(const DofVector& source, const SpacePtr& target);

/// Discrete elliptic operator: returns w with (w, phi) = a(v, phi) for all phi.
DofVector discrete_elliptic_apply(const DofVector& v, const DiffusionMatrix& diffusion);
DofVector discrete_elliptic_apply(const DofVector& v, const SparseOperator& stiffness);

/// Nodal interpolant.
DofVector interpolate(const SpatialFunction& f, const SpacePtr& target);

/// L2 norm via the mass matrix.
double l2_norm(const DofVector& v);

/// One quadrature point of the finer of two nested meshes, located in both.
struct CommonPoint {
  int fine = 0;
  int element_a = 0;
  int element_b = 0;
  Point x;
  Point xi_a;
  Point xi_b;
  double weight = 0.0;
};

/// Visit every quadrature point of the common refinement of a and b.
void for_each_common_point(const MeshPtr& a, const MeshPtr& b, int degree,
                           const std::function<void(const CommonPoint&)>& visit);

/// ||a - b|| for functions on (possibly different) nested meshes.
double l2_distance(const DofVector& a, const DofVector& b);

}  // namespace parest
