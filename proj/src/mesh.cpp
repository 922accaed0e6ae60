#include "parest/mesh.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "parest/errors.hpp"

namespace parest {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

Eigen::Vector3d barycentric(const ElementGeometry& g, const Point& x) {
  const Point xi = g.pullback(x);
  return {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
}

// Whether x lies on segment [p, q] up to a tolerance relative to |q - p|.
bool on_segment(const Point& x, const Point& p, const Point& q, double tol) {
  const Point d = q - p;
  const double len2 = d.squaredNorm();
  const Point r = x - p;
  const double cross = d.x() * r.y() - d.y() * r.x();
  if (std::abs(cross) > tol * len2) return false;
  const double s = d.dot(r) / len2;
  return s >= -tol && s <= 1.0 + tol;
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Point> vertices,
                           std::vector<std::array<int, 3>> triangles, int level)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), level_(level) {
  if (triangles_.empty()) throw DomainError("mesh without triangles");
  const int nv = num_vertices();
  for (const auto& t : triangles_)
    for (int v : t)
      if (v < 0 || v >= nv) throw DomainError("triangle references a missing vertex");

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(3 * triangles_.size());
  triangle_edges_.resize(triangles_.size());
  diameters_.resize(triangles_.size());
  for (int k = 0; k < num_triangles(); ++k) {
    if (signed_area(k) <= 0.0)
      throw DomainError("triangle " + std::to_string(k) + " is not counterclockwise");
    const auto& t = triangles_[k];
    double diam = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = t[i];
      const int b = t[(i + 1) % 3];
      diam = std::max(diam, (vertices_[a] - vertices_[b]).norm());
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_edges());
      if (inserted) {
        edges_.push_back(Edge{{a, b}, k, -1});
      } else {
        Edge& e = edges_[it->second];
        if (e.right >= 0)
          throw DomainError("edge shared by more than two triangles (non-conforming mesh)");
        e.right = k;
      }
      triangle_edges_[k][i] = it->second;
    }
    diameters_[k] = diam;
  }

  boundary_vertex_.assign(vertices_.size(), false);
  for (int e = 0; e < num_edges(); ++e) {
    if (edges_[e].interior()) {
      interior_edges_.push_back(e);
    } else {
      boundary_vertex_[edges_[e].vertices[0]] = true;
      boundary_vertex_[edges_[e].vertices[1]] = true;
    }
  }
}

double TriangleMesh::edge_length(int e) const {
  const auto& v = edges_[e].vertices;
  return (vertices_[v[1]] - vertices_[v[0]]).norm();
}

ElementGeometry TriangleMesh::geometry(int k) const {
  const auto& t = triangles_[k];
  ElementGeometry g;
  g.origin = vertices_[t[0]];
  g.jacobian.col(0) = vertices_[t[1]] - vertices_[t[0]];
  g.jacobian.col(1) = vertices_[t[2]] - vertices_[t[0]];
  g.det = g.jacobian.determinant();
  g.inverse = g.jacobian.inverse();
  return g;
}

double TriangleMesh::signed_area(int k) const {
  const auto& t = triangles_[k];
  const Point a = vertices_[t[1]] - vertices_[t[0]];
  const Point b = vertices_[t[2]] - vertices_[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double TriangleMesh::total_area() const {
  double s = 0.0;
  for (int k = 0; k < num_triangles(); ++k) s += signed_area(k);
  return s;
}

MeshPtr uniform_square_mesh(int level) {
  if (level < 0) throw DomainError("mesh level must be nonnegative");
  if (level > kMaxMeshLevel)
    throw CapacityError("mesh level " + std::to_string(level) + " exceeds the guard " +
                        std::to_string(kMaxMeshLevel));
  std::vector<Point> v = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  std::vector<std::array<int, 3>> t = {{0, 1, 2}, {0, 2, 3}};
  auto mesh = std::make_shared<const TriangleMesh>(std::move(v), std::move(t), 0);
  for (int i = 0; i < level; ++i) mesh = refine_red(*mesh);
  return mesh;
}

MeshPtr refine_red(const TriangleMesh& mesh) {
  std::vector<Point> v = mesh.vertices();
  const int nv = mesh.num_vertices();
  v.reserve(nv + mesh.num_edges());
  for (const Edge& e : mesh.edges())
    v.push_back(0.5 * (mesh.vertex(e.vertices[0]) + mesh.vertex(e.vertices[1])));

  std::vector<std::array<int, 3>> t;
  t.reserve(4 * mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& c = mesh.triangle(k);
    const auto& te = mesh.triangle_edges(k);
    const int m01 = nv + te[0];
    const int m12 = nv + te[1];
    const int m20 = nv + te[2];
    t.push_back({c[0], m01, m20});
    t.push_back({m01, c[1], m12});
    t.push_back({m20, m12, c[2]});
    t.push_back({m01, m12, m20});
  }
  return std::make_shared<const TriangleMesh>(std::move(v), std::move(t), mesh.level() + 1);
}

double mesh_size_max(const TriangleMesh& mesh) {
  const auto& d = mesh.element_diameters();
  return *std::max_element(d.begin(), d.end());
}

PointLocator::PointLocator(const TriangleMesh& mesh) : mesh_(&mesh) {
  Point lo = mesh.vertex(0);
  Point hi = lo;
  for (const Point& p : mesh.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = std::max((hi - lo).maxCoeff(), 1e-300);
  cells_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()))));
  cell_ = extent / cells_;
  lower_ = lo;
  buckets_.resize(static_cast<std::size_t>(cells_) * cells_);
  auto clamp_cell = [&](double c) {
    return std::clamp(static_cast<int>(std::floor(c)), 0, cells_ - 1);
  };
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    Point tlo = mesh.vertex(mesh.triangle(k)[0]);
    Point thi = tlo;
    for (int v : mesh.triangle(k)) {
      tlo = tlo.cwiseMin(mesh.vertex(v));
      thi = thi.cwiseMax(mesh.vertex(v));
    }
    const int i0 = clamp_cell((tlo.x() - lower_.x()) / cell_);
    const int i1 = clamp_cell((thi.x() - lower_.x()) / cell_);
    const int j0 = clamp_cell((tlo.y() - lower_.y()) / cell_);
    const int j1 = clamp_cell((thi.y() - lower_.y()) / cell_);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(i) * cells_ + j].push_back(k);
  }
}

int PointLocator::locate(const Point& x, double tol) const {
  const double ci = (x.x() - lower_.x()) / cell_;
  const double cj = (x.y() - lower_.y()) / cell_;
  if (ci < -tol * cells_ || cj < -tol * cells_ || ci > cells_ * (1 + tol) ||
      cj > cells_ * (1 + tol))
    return -1;
  const int i = std::clamp(static_cast<int>(std::floor(ci)), 0, cells_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(cj)), 0, cells_ - 1);
  for (int k : buckets_[static_cast<std::size_t>(i) * cells_ + j]) {
    const Eigen::Vector3d lam = barycentric(mesh_->geometry(k), x);
    if (lam.minCoeff() >= -tol) return k;
  }
  return -1;
}

CommonRefinement::CommonRefinement(MeshPtr a, MeshPtr b) {
  if (!a || !b) throw IncompatibleMeshError("null mesh");
  if (a->num_triangles() >= b->num_triangles()) {
    fine_ = std::move(a);
    coarse_ = std::move(b);
  } else {
    fine_ = std::move(b);
    coarse_ = std::move(a);
  }
  const int nf = fine_->num_triangles();
  const int ne = fine_->num_edges();

  identical_ = fine_.get() == coarse_.get();
  if (!identical_ && fine_->num_triangles() == coarse_->num_triangles() &&
      fine_->num_vertices() == coarse_->num_vertices() &&
      fine_->triangles() == coarse_->triangles()) {
    identical_ = true;
    for (int v = 0; v < fine_->num_vertices() && identical_; ++v)
      identical_ = (fine_->vertex(v) - coarse_->vertex(v)).norm() <= 1e-14;
  }
  if (identical_) {
    coarse_of_fine_.resize(nf);
    coarse_edge_of_fine_.resize(ne);
    for (int k = 0; k < nf; ++k) coarse_of_fine_[k] = k;
    for (int e = 0; e < ne; ++e) coarse_edge_of_fine_[e] = e;
    return;
  }

  const double area_f = fine_->total_area();
  const double area_c = coarse_->total_area();
  if (std::abs(area_f - area_c) > 1e-12 * std::max(area_f, area_c))
    throw IncompatibleMeshError("meshes cover different domains");

  constexpr double tol = 1e-10;
  const PointLocator locator(*coarse_);
  coarse_of_fine_.resize(nf);
  for (int k = 0; k < nf; ++k) {
    const auto& t = fine_->triangle(k);
    const Point centroid =
        (fine_->vertex(t[0]) + fine_->vertex(t[1]) + fine_->vertex(t[2])) / 3.0;
    const int c = locator.locate(centroid, tol);
    if (c < 0) throw IncompatibleMeshError("fine triangle outside the coarse mesh");
    const ElementGeometry g = coarse_->geometry(c);
    for (int v : t)
      if (barycentric(g, fine_->vertex(v)).minCoeff() < -tol)
        throw IncompatibleMeshError("meshes are not nested: triangle " + std::to_string(k) +
                                    " straddles coarse triangles");
    coarse_of_fine_[k] = c;
  }

  coarse_edge_of_fine_.assign(ne, -1);
  for (int e = 0; e < ne; ++e) {
    const Edge& fe = fine_->edge(e);
    const Point& p = fine_->vertex(fe.vertices[0]);
    const Point& q = fine_->vertex(fe.vertices[1]);
    const int c = coarse_of_fine_[fe.left];
    for (int ce : coarse_->triangle_edges(c)) {
      const Edge& cedge = coarse_->edge(ce);
      const Point& cp = coarse_->vertex(cedge.vertices[0]);
      const Point& cq = coarse_->vertex(cedge.vertices[1]);
      if (on_segment(p, cp, cq, tol) && on_segment(q, cp, cq, tol)) {
        if (fe.interior() && !cedge.interior())
          throw IncompatibleMeshError("interior fine edge on the coarse boundary");
        coarse_edge_of_fine_[e] = ce;
        break;
      }
    }
  }
}

bool CommonRefinement::is_fine(const TriangleMesh& mesh) const {
  return &mesh == fine_.get() || identical_;
}

int CommonRefinement::element_in(const TriangleMesh& mesh, int fine_triangle) const {
  if (&mesh == fine_.get()) return fine_triangle;
  if (&mesh == coarse_.get()) return coarse_of_fine_[fine_triangle];
  throw IncompatibleMeshError("mesh is not part of this refinement pair");
}

int CommonRefinement::edge_in(const TriangleMesh& mesh, int fine_edge) const {
  if (&mesh == fine_.get()) return fine_edge;
  if (&mesh == coarse_.get()) return coarse_edge_of_fine_[fine_edge];
  throw IncompatibleMeshError("mesh is not part of this refinement pair");
}

std::shared_ptr<const CommonRefinement> common_refinement(const MeshPtr& a,
                                                          const MeshPtr& b) {
  if (a.get() == b.get()) return std::make_shared<const CommonRefinement>(a, b);

  // Small FIFO cache: consecutive time steps reuse the same pair.
  static std::mutex mutex;
  static std::deque<std::shared_ptr<const CommonRefinement>> cache;
  constexpr std::size_t capacity = 8;
  {
    const std::lock_guard lock(mutex);
    for (const auto& entry : cache) {
      const auto* f = entry->fine_ptr().get();
      const auto* c = entry->coarse_ptr().get();
      if ((f == a.get() && c == b.get()) || (f == b.get() && c == a.get())) return entry;
    }
  }
  auto built = std::make_shared<const CommonRefinement>(a, b);
  const std::lock_guard lock(mutex);
  cache.push_back(built);
  if (cache.size() > capacity) cache.pop_front();
  return built;
}

double total_length(const std::vector<Segment>& segments) {
  double s = 0.0;
  for (const auto& seg : segments) s += seg.length();
  return s;
}

EdgeSets interior_edge_sets(const MeshPtr& current, const MeshPtr& previous) {
  const auto pair = common_refinement(current, previous);
  EdgeSets sets;
  for (int e : current->interior_edges()) {
    const auto& v = current->edge(e).vertices;
    sets.sigma.push_back({current->vertex(v[0]), current->vertex(v[1])});
  }
  const TriangleMesh& fine = pair->fine();
  for (int e : fine.interior_edges()) {
    const auto& v = fine.edge(e).vertices;
    Segment seg{fine.vertex(v[0]), fine.vertex(v[1])};
    if (pair->coarse_edge(e) >= 0)
      sets.sigma_hat.push_back(seg);
    else
      sets.sigma_check_minus_hat.push_back(seg);
  }
  return sets;
}

void write_mesh(std::ostream& out, const TriangleMesh& mesh) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (const Point& p : mesh.vertices()) out << "v " << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles()) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out.flags(flags);
  out.precision(precision);
}

MeshPtr read_mesh(std::istream& in, int level) {
  std::vector<Point> v;
  std::vector<std::array<int, 3>> t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x = 0.0;
      double y = 0.0;
      if (!(ls >> x >> y)) throw DomainError("bad vertex on line " + std::to_string(lineno));
      v.emplace_back(x, y);
    } else if (tag == "t") {
      std::array<int, 3> tri{};
      if (!(ls >> tri[0] >> tri[1] >> tri[2]))
        throw DomainError("bad triangle on line " + std::to_string(lineno));
      t.push_back(tri);
    } else {
      throw DomainError("unknown record '" + tag + "' on line " + std::to_string(lineno));
    }
  }
  return std::make_shared<const TriangleMesh>(std::move(v), std::move(t), level);
}

}  // namespace parest
