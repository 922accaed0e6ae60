#include "parest/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "parest/errors.hpp"

namespace parest {

LineRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one point");
  LineRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

namespace {

TriangleRule centroid_rule() {
  return {{Point(1.0 / 3.0, 1.0 / 3.0)}, {0.5}, 1};
}

TriangleRule three_point_rule() {
  TriangleRule r;
  r.degree = 2;
  r.points = {Point(1.0 / 6.0, 1.0 / 6.0), Point(2.0 / 3.0, 1.0 / 6.0),
              Point(1.0 / 6.0, 2.0 / 3.0)};
  r.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  return r;
}

// Seven-point degree-5 rule (Radon).
TriangleRule seven_point_rule() {
  TriangleRule r;
  r.degree = 5;
  const double s15 = std::sqrt(15.0);
  const double a = (6.0 - s15) / 21.0;
  const double b = (6.0 + s15) / 21.0;
  const double wa = (155.0 - s15) / 2400.0;
  const double wb = (155.0 + s15) / 2400.0;
  r.points = {Point(1.0 / 3.0, 1.0 / 3.0),
              Point(a, a), Point(1.0 - 2.0 * a, a), Point(a, 1.0 - 2.0 * a),
              Point(b, b), Point(1.0 - 2.0 * b, b), Point(b, 1.0 - 2.0 * b)};
  r.weights = {9.0 / 80.0, wa, wa, wa, wb, wb, wb};
  return r;
}

// Duffy map (u, v) in [0,1]^2 -> (u (1 - v), v) with Jacobian (1 - v); the
// extra factor raises the degree in v by one.
TriangleRule collapsed_rule(int degree) {
  const int n = (degree + 2 + 1) / 2;
  const LineRule g = gauss_legendre(n, 0.0, 1.0);
  TriangleRule r;
  r.degree = degree;
  for (int j = 0; j < n; ++j) {
    const double v = g.nodes[j];
    for (int i = 0; i < n; ++i) {
      const double u = g.nodes[i];
      r.points.emplace_back(u * (1.0 - v), v);
      r.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - v));
    }
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  if (degree < 0 || degree > kMaxTriangleRuleDegree)
    throw CapabilityError("no triangle rule of degree " + std::to_string(degree));
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<TriangleRule>> rules;
  const std::lock_guard lock(mutex);
  auto& slot = rules[degree];
  if (!slot) {
    TriangleRule r = degree <= 1   ? centroid_rule()
                     : degree == 2 ? three_point_rule()
                     : degree <= 5 ? seven_point_rule()
                                   : collapsed_rule(degree);
    r.degree = degree;
    slot = std::make_unique<TriangleRule>(std::move(r));
  }
  return *slot;
}

double quadrature_integrate(const TriangleMesh& mesh,
                            const std::function<double(const Point&)>& integrand,
                            int degree) {
  const TriangleRule& rule = triangle_rule(degree);
  double total = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry g = mesh.geometry(k);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      local += rule.weights[q] * integrand(g.map(rule.points[q]));
    total += g.det * local;
  }
  return total;
}

QuadratureCloud QuadratureCloud::on_mesh(const TriangleMesh& mesh, int degree) {
  const TriangleRule& rule = triangle_rule(degree);
  QuadratureCloud cloud;
  cloud.points.reserve(mesh.num_triangles() * rule.points.size());
  cloud.weights.reserve(mesh.num_triangles() * rule.points.size());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry g = mesh.geometry(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      cloud.points.push_back(g.map(rule.points[q]));
      cloud.weights.push_back(g.det * rule.weights[q]);
    }
  }
  return cloud;
}

double QuadratureCloud::integrate(const std::function<double(const Point&)>& integrand) const {
  double s = 0.0;
  for (std::size_t q = 0; q < points.size(); ++q) s += weights[q] * integrand(points[q]);
  return s;
}

}  // namespace parest
