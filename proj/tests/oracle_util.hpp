// Independent helpers used as test oracles. They rely only on mesh geometry
// and closed-form P1 formulas, not on the library's evaluation routines.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "parest/fespace.hpp"
#include "parest/quadrature.hpp"
#include "parest/timestepper.hpp"

namespace oracle {

using parest::Point;

inline double area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

/// Gradients of the three barycentric coordinates of a triangle.
inline std::array<Point, 3> barycentric_gradients(const parest::TriangleMesh& m, int k) {
  const auto& t = m.triangle(k);
  const std::array<Point, 3> p = {m.vertex(t[0]), m.vertex(t[1]), m.vertex(t[2])};
  const double twice = 2.0 * area(p[0], p[1], p[2]);
  std::array<Point, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point& a = p[(i + 1) % 3];
    const Point& b = p[(i + 2) % 3];
    g[i] = Point(a.y() - b.y(), b.x() - a.x()) / twice;
  }
  return g;
}

inline std::array<double, 3> barycentric(const parest::TriangleMesh& m, int k, const Point& x) {
  const auto& t = m.triangle(k);
  const Point& a = m.vertex(t[0]);
  const Point& b = m.vertex(t[1]);
  const Point& c = m.vertex(t[2]);
  const double s = area(a, b, c);
  return {area(x, b, c) / s, area(a, x, c) / s, area(a, b, x) / s};
}

/// Vertex values of a P1 function (zero at eliminated boundary vertices).
inline std::vector<double> vertex_values(const parest::DofVector& u) {
  const parest::TriangleMesh& m = u.space->mesh();
  std::vector<double> v(m.num_vertices(), 0.0);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const auto dofs = u.space->element_dofs(k);
    for (int i = 0; i < 3; ++i)
      if (dofs[i] >= 0) v[m.triangle(k)[i]] = u.coefficients[dofs[i]];
  }
  return v;
}

/// P1 evaluation by point location and barycentric coordinates.
class P1Evaluator {
 public:
  explicit P1Evaluator(const parest::DofVector& u)
      : mesh_(u.space->mesh_ptr()), locator_(*mesh_), values_(vertex_values(u)) {}

  double operator()(const Point& x) const {
    const int k = locator_.locate(x, 1e-9);
    if (k < 0) return 0.0;
    const auto l = barycentric(*mesh_, k, x);
    const auto& t = mesh_->triangle(k);
    return l[0] * values_[t[0]] + l[1] * values_[t[1]] + l[2] * values_[t[2]];
  }

  Point gradient(int k) const {
    const auto g = barycentric_gradients(*mesh_, k);
    const auto& t = mesh_->triangle(k);
    return g[0] * values_[t[0]] + g[1] * values_[t[1]] + g[2] * values_[t[2]];
  }

 private:
  parest::MeshPtr mesh_;
  parest::PointLocator locator_;
  std::vector<double> values_;
};

/// Integral over one triangle of the square of a P1 function with vertex
/// values a: S/12 (sum a_i^2 + (sum a_i)^2).
inline double p1_square_integral(double s, double a, double b, double c) {
  return s / 12.0 * (a * a + b * b + c * c + (a + b + c) * (a + b + c));
}

/// Outward unit normal of triangle k across the segment p-q (one of its sides).
inline Point outward_normal(const parest::TriangleMesh& m, int k, const Point& p, const Point& q) {
  const Point t = q - p;
  Point n(t.y(), -t.x());
  n.normalize();
  const auto& tri = m.triangle(k);
  const Point c = (m.vertex(tri[0]) + m.vertex(tri[1]) + m.vertex(tri[2])) / 3.0;
  if ((c - p).dot(n) > 0) n = -n;
  return n;
}

/// A grad U . n summed over both sides of every interior edge, P1, A = I.
inline std::vector<double> hand_jumps(const parest::DofVector& u) {
  const parest::TriangleMesh& m = u.space->mesh();
  const P1Evaluator ev(u);
  std::vector<double> j(m.num_edges(), 0.0);
  for (int e : m.interior_edges()) {
    const auto& edge = m.edge(e);
    const Point& p = m.vertex(edge.vertices[0]);
    const Point& q = m.vertex(edge.vertices[1]);
    j[e] = ev.gradient(edge.left).dot(outward_normal(m, edge.left, p, q)) +
           ev.gradient(edge.right).dot(outward_normal(m, edge.right, p, q));
  }
  return j;
}

/// Dense solve of M w = K u (the discrete elliptic operator).
inline Eigen::VectorXd dense_elliptic(const parest::FeSpace& s, const parest::SparseOperator& k,
                                      const Eigen::VectorXd& u) {
  const Eigen::MatrixXd md = Eigen::MatrixXd(s.mass().matrix);
  const Eigen::MatrixXd kd = Eigen::MatrixXd(k.matrix);
  return md.ldlt().solve(kd * u);
}

/// Random partition of [0, T] with step ratios in [0.1, 10].
inline parest::TimePartition random_partition(std::mt19937_64& rng, int steps, double final_time) {
  std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
  std::vector<double> w(steps);
  double total = 0.0;
  for (double& x : w) total += (x = std::exp(u(rng)));
  std::vector<double> nodes{0.0};
  double acc = 0.0;
  for (int i = 0; i < steps - 1; ++i) nodes.push_back((acc += w[i]) * final_time / total);
  nodes.push_back(final_time);
  return parest::TimePartition(std::move(nodes));
}

/// Composite Gauss-Legendre integral of fn over [a, b].
template <class Fn>
double composite_gauss(Fn&& fn, double a, double b, int pieces, int points) {
  const parest::LineRule r = parest::gauss_legendre(points, 0.0, 1.0);
  double s = 0.0;
  const double h = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i)
    for (std::size_t q = 0; q < r.nodes.size(); ++q) s += h * r.weights[q] * fn(a + h * (i + r.nodes[q]));
  return s;
}

/// Adaptive Gauss-Legendre: bisect until a 10-point rule and its two halves agree.
template <class Fn>
double adaptive_gauss(Fn&& fn, double a, double b, double tol, int depth = 0) {
  static const parest::LineRule r = parest::gauss_legendre(10, 0.0, 1.0);
  const auto rule = [&](double lo, double hi) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.nodes.size(); ++q) s += (hi - lo) * r.weights[q] * fn(lo + (hi - lo) * r.nodes[q]);
    return s;
  };
  const double mid = 0.5 * (a + b);
  const double whole = rule(a, b);
  const double halves = rule(a, mid) + rule(mid, b);
  if (std::abs(whole - halves) <= tol || depth >= 50) return halves;
  return adaptive_gauss(fn, a, mid, 0.5 * tol, depth + 1) + adaptive_gauss(fn, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace oracle
