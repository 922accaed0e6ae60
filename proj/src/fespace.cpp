#include "parest/fespace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <string>

#include "parest/errors.hpp"
#include "parest/quadrature.hpp"

namespace parest {

// ---------------------------------------------------------------- reference

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
  if (degree < 1 || degree > 6)
    throw CapabilityError("Lagrange degree " + std::to_string(degree) + " not supported");
  const double l = degree;
  nodes_ = {Point(0, 0), Point(1, 0), Point(0, 1)};
  const std::array<Point, 3> corner = {Point(0, 0), Point(1, 0), Point(0, 1)};
  for (int e = 0; e < 3; ++e) {
    const Point& a = corner[e];
    const Point& b = corner[(e + 1) % 3];
    for (int j = 1; j < degree; ++j) nodes_.push_back(a + (j / l) * (b - a));
  }
  for (int j = 1; j < degree; ++j)
    for (int i = 1; i + j < degree; ++i) nodes_.emplace_back(i / l, j / l);

  for (int total = 0; total <= degree; ++total)
    for (int py = 0; py <= total; ++py) exponents_.push_back({total - py, py});

  const int n = num_nodes();
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      v(i, j) = std::pow(nodes_[i].x(), exponents_[j][0]) * std::pow(nodes_[i].y(), exponents_[j][1]);
  // phi_i = sum_j C(i,j) m_j with phi_i(node_k) = delta_ik, so C = V^{-T}.
  coefficients_ = v.inverse().transpose();
}

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

void ReferenceElement::values(const Point& xi, Eigen::Ref<Eigen::VectorXd> out) const {
  if (degree_ == 1) {
    out << 1.0 - xi.x() - xi.y(), xi.x(), xi.y();
    return;
  }
  Eigen::VectorXd m(exponents_.size());
  for (std::size_t j = 0; j < exponents_.size(); ++j)
    m[j] = ipow(xi.x(), exponents_[j][0]) * ipow(xi.y(), exponents_[j][1]);
  out = coefficients_ * m;
}

void ReferenceElement::gradients(const Point& xi, Eigen::Ref<Eigen::MatrixX2d> out) const {
  if (degree_ == 1) {
    out << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
    return;
  }
  Eigen::MatrixX2d dm(exponents_.size(), 2);
  for (std::size_t j = 0; j < exponents_.size(); ++j) {
    const int px = exponents_[j][0];
    const int py = exponents_[j][1];
    dm(j, 0) = px == 0 ? 0.0 : px * ipow(xi.x(), px - 1) * ipow(xi.y(), py);
    dm(j, 1) = py == 0 ? 0.0 : py * ipow(xi.x(), px) * ipow(xi.y(), py - 1);
  }
  out = coefficients_ * dm;
}

void ReferenceElement::hessians(const Point& xi, std::vector<Eigen::Matrix2d>& out) const {
  const int n = num_nodes();
  out.assign(n, Eigen::Matrix2d::Zero());
  if (degree_ == 1) return;
  for (std::size_t j = 0; j < exponents_.size(); ++j) {
    const int px = exponents_[j][0];
    const int py = exponents_[j][1];
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    if (px >= 2) h(0, 0) = px * (px - 1) * ipow(xi.x(), px - 2) * ipow(xi.y(), py);
    if (py >= 2) h(1, 1) = py * (py - 1) * ipow(xi.x(), px) * ipow(xi.y(), py - 2);
    if (px >= 1 && py >= 1) h(0, 1) = h(1, 0) = px * py * ipow(xi.x(), px - 1) * ipow(xi.y(), py - 1);
    for (int i = 0; i < n; ++i) out[i] += coefficients_(i, j) * h;
  }
}

// ---------------------------------------------------------------- diffusion

DiffusionMatrix DiffusionMatrix::from_matrix(const Eigen::Matrix2d& a) {
  if (!a.allFinite()) throw DomainError("diffusion matrix has non-finite entries");
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-14 * a.norm())
    throw DomainError("diffusion matrix must be symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (!(ev[0] > 0.0)) throw DomainError("diffusion matrix must be positive definite");
  DiffusionMatrix d;
  d.matrix = a;
  d.alpha = ev[0];
  d.beta = ev[1];
  return d;
}

// ---------------------------------------------------------------- space

FeSpace::FeSpace(MeshPtr mesh, int degree, bool homogeneous_dirichlet, SolverOptions solver)
    : mesh_(std::move(mesh)), reference_(degree), dirichlet_(homogeneous_dirichlet), solver_(solver) {
  if (!mesh_) throw DomainError("finite element space needs a mesh");
  const TriangleMesh& m = *mesh_;
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  const int per_edge = degree - 1;
  const int per_cell = (degree - 1) * (degree - 2) / 2;
  const int nloc = reference_.num_nodes();
  const int total = nv + ne * per_edge + m.num_triangles() * per_cell;

  node_coords_.assign(total, Point::Zero());
  boundary_node_.assign(total, false);
  for (int v = 0; v < nv; ++v) {
    node_coords_[v] = m.vertex(v);
    boundary_node_[v] = m.is_boundary_vertex(v);
  }
  element_nodes_.resize(static_cast<std::size_t>(m.num_triangles()) * nloc);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const auto& tri = m.triangle(k);
    const auto& tedges = m.triangle_edges(k);
    const ElementGeometry g = m.geometry(k);
    int* local = element_nodes_.data() + static_cast<std::size_t>(k) * nloc;
    for (int i = 0; i < 3; ++i) local[i] = tri[i];
    int slot = 3;
    for (int le = 0; le < 3; ++le) {
      const int e = tedges[le];
      const Edge& edge = m.edge(e);
      // Local traversal follows v_le -> v_{le+1}; global follows the edge.
      const bool same = edge.vertices[0] == tri[le];
      for (int j = 0; j < per_edge; ++j) {
        const int jj = same ? j : per_edge - 1 - j;
        const int node = nv + e * per_edge + jj;
        local[slot + j] = node;
        boundary_node_[node] = !edge.interior();
      }
      slot += per_edge;
    }
    for (int j = 0; j < per_cell; ++j) local[slot + j] = nv + ne * per_edge + k * per_cell + j;
    for (int i = 3; i < nloc; ++i) node_coords_[local[i]] = g.map(reference_.nodes()[i]);
  }

  std::vector<int> dof_of_node(total, -1);
  for (int node = 0; node < total; ++node) {
    if (dirichlet_ && boundary_node_[node]) continue;
    dof_of_node[node] = num_dofs_++;
    dof_nodes_.push_back(node);
  }
  element_dofs_.resize(element_nodes_.size());
  for (std::size_t i = 0; i < element_nodes_.size(); ++i) element_dofs_[i] = dof_of_node[element_nodes_[i]];
}

std::span<const int> FeSpace::element_dofs(int k) const {
  const std::size_t n = reference_.num_nodes();
  return {element_dofs_.data() + k * n, n};
}

std::span<const int> FeSpace::element_nodes(int k) const {
  const std::size_t n = reference_.num_nodes();
  return {element_nodes_.data() + k * n, n};
}

std::vector<int> FeSpace::boundary_dofs() const {
  std::vector<int> out;
  for (int d = 0; d < num_dofs_; ++d)
    if (boundary_node_[dof_nodes_[d]]) out.push_back(d);
  return out;
}

void FeSpace::build_caches() const {
  std::call_once(cache_once_, [this] {
    mass_ = std::make_unique<SparseOperator>(assemble_mass(*this));
    mass_solver_ = std::make_unique<LinearSolver>(*mass_, solver_);
  });
}

const SparseOperator& FeSpace::mass() const {
  build_caches();
  return *mass_;
}

const LinearSolver& FeSpace::mass_solver() const {
  build_caches();
  return *mass_solver_;
}

SpacePtr make_space(MeshPtr mesh, int degree, bool homogeneous_dirichlet, SolverOptions solver) {
  return std::make_shared<const FeSpace>(std::move(mesh), degree, homogeneous_dirichlet, solver);
}

// ---------------------------------------------------------------- dof vector

DofVector::DofVector(SpacePtr s) : space(std::move(s)) {
  if (!space) throw DomainError("dof vector needs a space");
  coefficients = Vector::Zero(space->num_dofs());
}

DofVector::DofVector(SpacePtr s, Vector c) : space(std::move(s)), coefficients(std::move(c)) {
  if (!space) throw DomainError("dof vector needs a space");
  if (coefficients.size() != space->num_dofs())
    throw SizeError("coefficient vector has length " + std::to_string(coefficients.size()) +
                    ", space has " + std::to_string(space->num_dofs()) + " dofs");
}

Eigen::VectorXd DofVector::local(int k) const {
  const auto dofs = space->element_dofs(k);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c[i] = dofs[i] >= 0 ? coefficients[dofs[i]] : 0.0;
  return c;
}

double DofVector::value(int k, const Point& xi) const {
  Eigen::VectorXd phi(space->dofs_per_element());
  space->reference().values(xi, phi);
  return phi.dot(local(k));
}

Point DofVector::gradient(int k, const Point& xi) const {
  Eigen::MatrixX2d dphi(space->dofs_per_element(), 2);
  space->reference().gradients(xi, dphi);
  const Eigen::Vector2d ref = dphi.transpose() * local(k);
  return space->mesh().geometry(k).inverse.transpose() * ref;
}

Eigen::Matrix2d DofVector::hessian(int k, const Point& xi) const {
  std::vector<Eigen::Matrix2d> h;
  space->reference().hessians(xi, h);
  const Eigen::VectorXd c = local(k);
  Eigen::Matrix2d ref = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < h.size(); ++i) ref += c[i] * h[i];
  const Eigen::Matrix2d inv = space->mesh().geometry(k).inverse;
  return inv.transpose() * ref * inv;
}

// ---------------------------------------------------------------- assembly

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseOperator from_triplets(int n, const Triplets& t) {
  SparseOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.matrix.makeCompressed();
  op.symmetric = true;
  return op;
}

template <class LocalFn>
SparseOperator assemble_bilinear(const FeSpace& space, LocalFn&& local_matrix) {
  const int nloc = space.dofs_per_element();
  Triplets t;
  t.reserve(static_cast<std::size_t>(space.mesh().num_triangles()) * nloc * nloc);
  Eigen::MatrixXd a(nloc, nloc);
  for (int k = 0; k < space.mesh().num_triangles(); ++k) {
    local_matrix(k, a);
    const auto dofs = space.element_dofs(k);
    for (int i = 0; i < nloc; ++i) {
      if (dofs[i] < 0) continue;
      for (int j = 0; j < nloc; ++j)
        if (dofs[j] >= 0) t.emplace_back(dofs[i], dofs[j], a(i, j));
    }
  }
  return from_triplets(space.num_dofs(), t);
}

}  // namespace

SparseOperator assemble_mass(const FeSpace& space) {
  const TriangleRule& rule = triangle_rule(2 * space.degree());
  const int nloc = space.dofs_per_element();
  std::vector<Eigen::VectorXd> phi(rule.points.size(), Eigen::VectorXd(nloc));
  for (std::size_t q = 0; q < rule.points.size(); ++q) space.reference().values(rule.points[q], phi[q]);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(nloc, nloc);
  for (std::size_t q = 0; q < rule.points.size(); ++q) ref += rule.weights[q] * phi[q] * phi[q].transpose();
  ref = 0.5 * (ref + ref.transpose()).eval();
  return assemble_bilinear(space, [&](int k, Eigen::MatrixXd& a) {
    a = space.mesh().geometry(k).det * ref;
  });
}

SparseOperator assemble_stiffness(const FeSpace& space, const DiffusionMatrix& diffusion) {
  const int deg = std::max(0, 2 * space.degree() - 2);
  const TriangleRule& rule = triangle_rule(deg);
  const int nloc = space.dofs_per_element();
  std::vector<Eigen::MatrixX2d> dphi(rule.points.size(), Eigen::MatrixX2d(nloc, 2));
  for (std::size_t q = 0; q < rule.points.size(); ++q) space.reference().gradients(rule.points[q], dphi[q]);
  const Eigen::Matrix2d& a_mat = diffusion.matrix;
  return assemble_bilinear(space, [&](int k, Eigen::MatrixXd& a) {
    const ElementGeometry g = space.mesh().geometry(k);
    a.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Eigen::MatrixX2d grad = dphi[q] * g.inverse;  // rows: physical gradients
      a += (rule.weights[q] * g.det) * grad * a_mat * grad.transpose();
    }
    a = 0.5 * (a + a.transpose()).eval();
  });
}

Vector assemble_load(const FeSpace& space, const SpatialFunction& f, int quadrature_degree) {
  const TriangleRule& rule = triangle_rule(quadrature_degree);
  const int nloc = space.dofs_per_element();
  std::vector<Eigen::VectorXd> phi(rule.points.size(), Eigen::VectorXd(nloc));
  for (std::size_t q = 0; q < rule.points.size(); ++q) space.reference().values(rule.points[q], phi[q]);
  Vector b = Vector::Zero(space.num_dofs());
  Eigen::VectorXd local(nloc);
  for (int k = 0; k < space.mesh().num_triangles(); ++k) {
    const ElementGeometry g = space.mesh().geometry(k);
    local.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      local += (rule.weights[q] * f(g.map(rule.points[q]))) * phi[q];
    local *= g.det;
    const auto dofs = space.element_dofs(k);
    for (int i = 0; i < nloc; ++i)
      if (dofs[i] >= 0) b[dofs[i]] += local[i];
  }
  return b;
}

// ---------------------------------------------------------------- cross-mesh

void for_each_common_point(const MeshPtr& a, const MeshPtr& b, int degree,
                           const std::function<void(const CommonPoint&)>& visit) {
  const TriangleRule& rule = triangle_rule(degree);
  CommonPoint p;
  if (a == b) {
    for (int k = 0; k < a->num_triangles(); ++k) {
      const ElementGeometry g = a->geometry(k);
      p.fine = p.element_a = p.element_b = k;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        p.xi_a = p.xi_b = rule.points[q];
        p.x = g.map(rule.points[q]);
        p.weight = rule.weights[q] * g.det;
        visit(p);
      }
    }
    return;
  }
  const auto cr = common_refinement(a, b);
  const TriangleMesh& fine = cr->fine();
  for (int k = 0; k < fine.num_triangles(); ++k) {
    const ElementGeometry g = fine.geometry(k);
    p.fine = k;
    p.element_a = cr->element_in(*a, k);
    p.element_b = cr->element_in(*b, k);
    const ElementGeometry ga = a->geometry(p.element_a);
    const ElementGeometry gb = b->geometry(p.element_b);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      p.x = g.map(rule.points[q]);
      p.xi_a = ga.pullback(p.x);
      p.xi_b = gb.pullback(p.x);
      p.weight = rule.weights[q] * g.det;
      visit(p);
    }
  }
}

Vector mass_pairing(const DofVector& v, const FeSpace& target) {
  if (v.space.get() == &target) return target.mass().apply(v.coefficients);
  const FeSpace& src = *v.space;
  const int degree = src.degree() + target.degree();
  const int nsrc = src.dofs_per_element();
  const int ntgt = target.dofs_per_element();
  Vector out = Vector::Zero(target.num_dofs());
  Eigen::VectorXd phi_s(nsrc);
  Eigen::VectorXd phi_t(ntgt);
  int cached_elem = -1;
  Eigen::VectorXd coeffs;
  for_each_common_point(src.mesh_ptr(), target.mesh_ptr(), degree, [&](const CommonPoint& p) {
    if (p.element_a != cached_elem) {
      coeffs = v.local(p.element_a);
      cached_elem = p.element_a;
    }
    src.reference().values(p.xi_a, phi_s);
    const double val = phi_s.dot(coeffs) * p.weight;
    target.reference().values(p.xi_b, phi_t);
    const auto dofs = target.element_dofs(p.element_b);
    for (int i = 0; i < ntgt; ++i)
      if (dofs[i] >= 0) out[dofs[i]] += val * phi_t[i];
  });
  return out;
}

DofVector l2_project(const SpatialFunction& source, const SpacePtr& target, int quadrature_degree) {
  const Vector b = assemble_load(*target, source, quadrature_degree);
  return DofVector(target, target->mass_solver().solve(b));
}

DofVector l2_project(const DofVector& source, const SpacePtr& target) {
  if (source.space == target) return source;
  const Vector b = mass_pairing(source, *target);
  return DofVector(target, target->mass_solver().solve(b));
}

DofVector discrete_elliptic_apply(const DofVector& v, const SparseOperator& stiffness) {
  if (stiffness.rows() != v.size()) throw SizeError("stiffness operator does not match the vector");
  return DofVector(v.space, v.space->mass_solver().solve(stiffness.apply(v.coefficients)));
}

DofVector discrete_elliptic_apply(const DofVector& v, const DiffusionMatrix& diffusion) {
  return discrete_elliptic_apply(v, assemble_stiffness(*v.space, diffusion));
}

DofVector interpolate(const SpatialFunction& f, const SpacePtr& target) {
  Vector c(target->num_dofs());
  for (int d = 0; d < target->num_dofs(); ++d) c[d] = f(target->node_coordinate(target->node_of_dof(d)));
  return DofVector(target, std::move(c));
}

double l2_norm(const DofVector& v) {
  return std::sqrt(std::max(0.0, v.coefficients.dot(v.space->mass().apply(v.coefficients))));
}

double l2_distance(const DofVector& a, const DofVector& b) {
  if (a.space == b.space) return l2_norm(DofVector(a.space, a.coefficients - b.coefficients));
  const int degree = 2 * std::max(a.space->degree(), b.space->degree());
  Eigen::VectorXd pa(a.space->dofs_per_element());
  Eigen::VectorXd pb(b.space->dofs_per_element());
  int ea = -1;
  int eb = -1;
  Eigen::VectorXd ca;
  Eigen::VectorXd cb;
  double s = 0.0;
  for_each_common_point(a.space->mesh_ptr(), b.space->mesh_ptr(), degree, [&](const CommonPoint& p) {
    if (p.element_a != ea) { ca = a.local(p.element_a); ea = p.element_a; }
    if (p.element_b != eb) { cb = b.local(p.element_b); eb = p.element_b; }
    a.space->reference().values(p.xi_a, pa);
    b.space->reference().values(p.xi_b, pb);
    const double d = pa.dot(ca) - pb.dot(cb);
    s += p.weight * d * d;
  });
  return std::sqrt(s);
}

}  // namespace parest
