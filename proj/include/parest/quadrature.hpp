#pragma once

#include <functional>
#include <vector>

#include "parest/mesh.hpp"

namespace parest {

/// Nodes and weights on an interval.
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for degree 2n-1.
LineRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct TriangleRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;
};

constexpr int kMaxTriangleRuleDegree = 40;

/// Rule exact for polynomials of total degree <= `degree`.
///
/// Degrees up to 5 use fully symmetric rules (1, 3 and 7 points); higher
/// degrees use a collapsed Gauss-Legendre product rule. Throws
/// CapabilityError outside [0, kMaxTriangleRuleDegree].
const TriangleRule& triangle_rule(int degree);

/// Sum over triangles of the degree-exact rule applied to `integrand`.
double quadrature_integrate(const TriangleMesh& mesh,
                            const std::function<double(const Point&)>& integrand,
                            int degree);

/// Points and weights covering a whole mesh, for repeated spatial integrals
/// of functions that do not live on a finite element space.
struct QuadratureCloud {
  std::vector<Point> points;
  std::vector<double> weights;

  static QuadratureCloud on_mesh(const TriangleMesh& mesh, int degree);

  double integrate(const std::function<double(const Point&)>& integrand) const;
};

}  // namespace parest
