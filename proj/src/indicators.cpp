#include "parest/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parest/errors.hpp"

namespace parest {

void EstimatorConstants::validate() const {
  const auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive and finite");
  };
  check(c62, "C62");
  check(c102, "C102");
  check(c142, "C142");
  check(c_pf, "C_PF");
  check(alpha, "alpha");
}

namespace {

// Outward unit normal of triangle k on edge e.
Point outward_normal(const TriangleMesh& mesh, int k, int e) {
  const Edge& edge = mesh.edge(e);
  const Point& a = mesh.vertex(edge.vertices[0]);
  const Point& b = mesh.vertex(edge.vertices[1]);
  const Point t = b - a;
  Point n(t.y(), -t.x());
  n /= n.norm();
  const auto& tri = mesh.triangle(k);
  const Point c = (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0;
  if ((c - a).dot(n) > 0.0) n = -n;
  return n;
}

Point physical_gradient_at(const DofVector& u, int k, const Point& x) {
  return u.gradient(k, u.space->mesh().geometry(k).pullback(x));
}

const LineRule& edge_rule(int degree) {
  static const LineRule rules[] = {gauss_legendre(2, 0.0, 1.0), gauss_legendre(3, 0.0, 1.0),
                                   gauss_legendre(4, 0.0, 1.0), gauss_legendre(5, 0.0, 1.0),
                                   gauss_legendre(6, 0.0, 1.0), gauss_legendre(7, 0.0, 1.0)};
  return rules[std::clamp(degree, 1, 6) - 1];
}

// Integral over the segment [a, b] of (fn)^2.
template <class Fn>
double segment_square_integral(const Point& a, const Point& b, int degree, Fn&& fn) {
  const LineRule& r = edge_rule(degree);
  const double len = (b - a).norm();
  double s = 0.0;
  for (std::size_t q = 0; q < r.nodes.size(); ++q) {
    const double v = fn(Point(a + r.nodes[q] * (b - a)));
    s += r.weights[q] * v * v;
  }
  return s * len;
}

}  // namespace

double ResidualData::inner(int k, const Point& xi) const {
  double v = -elliptic.value(k, xi);
  if (solution.space->degree() > 1)
    v += (diffusion.matrix.cwiseProduct(solution.hessian(k, xi))).sum();
  return v;
}

double ResidualData::jump_at(int e, const Point& x) const {
  if (!edge_jump.empty()) return edge_jump[e];
  const TriangleMesh& m = mesh();
  const Edge& edge = m.edge(e);
  if (!edge.interior()) return 0.0;
  const Point n = outward_normal(m, edge.left, e);
  const Point gl = physical_gradient_at(solution, edge.left, x);
  const Point gr = physical_gradient_at(solution, edge.right, x);
  return (diffusion.matrix * (gl - gr)).dot(n);
}

ResidualData compute_residuals(const DofVector& u, const DofVector& elliptic,
                               const DiffusionMatrix& diffusion) {
  if (u.space != elliptic.space) throw IncompatibleMeshError("residual parts live on different spaces");
  ResidualData r{u, elliptic, diffusion, {}};
  if (u.space->degree() != 1) return r;
  const TriangleMesh& m = u.space->mesh();
  std::vector<Point> grads(m.num_triangles());
  const Point centroid(1.0 / 3.0, 1.0 / 3.0);
  for (int k = 0; k < m.num_triangles(); ++k) grads[k] = diffusion.matrix * u.gradient(k, centroid);
  r.edge_jump.assign(m.num_edges(), 0.0);
  for (int e : m.interior_edges()) {
    const Edge& edge = m.edge(e);
    const Point n = outward_normal(m, edge.left, e);
    r.edge_jump[e] = (grads[edge.left] - grads[edge.right]).dot(n);
  }
  return r;
}

ResidualData compute_residuals(const DiscreteSolution& sol, int n) {
  return compute_residuals(sol.values[n], discrete_elliptic(sol, n), sol.config.diffusion);
}

double epsilon_n(const ResidualData& res, const EstimatorConstants& c) {
  const TriangleMesh& m = res.mesh();
  const int deg = res.solution.space->degree();
  const TriangleRule& rule = triangle_rule(2 * deg);
  double inner = 0.0;
  for (int k = 0; k < m.num_triangles(); ++k) {
    const double h = m.diameter(k);
    const double det = m.geometry(k).det;
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double v = res.inner(k, rule.points[q]);
      local += rule.weights[q] * v * v;
    }
    inner += h * h * h * h * det * local;
  }
  double jump = 0.0;
  for (int e : m.interior_edges()) {
    const double h = m.edge_length(e);
    const auto& v = m.edge(e).vertices;
    jump += h * h * h *
            segment_square_integral(m.vertex(v[0]), m.vertex(v[1]), deg,
                                    [&](const Point& x) { return res.jump_at(e, x); });
  }
  return c.c62 * std::sqrt(inner) + c.c102 * std::sqrt(jump);
}

double eta_n(const ResidualData& current, const ResidualData& previous, double tau,
             const EstimatorConstants& c) {
  if (!(tau > 0.0)) throw DomainError("time step must be positive");
  const MeshPtr& mn = current.solution.space->mesh_ptr();
  const MeshPtr& mp = previous.solution.space->mesh_ptr();
  const int deg = std::max(current.solution.space->degree(), previous.solution.space->degree());

  double inner = 0.0;
  for_each_common_point(mn, mp, 2 * deg, [&](const CommonPoint& p) {
    const double h = std::max(mn->diameter(p.element_a), mp->diameter(p.element_b));
    const double d = (current.inner(p.element_a, p.xi_a) - previous.inner(p.element_b, p.xi_b)) / tau;
    inner += h * h * h * h * p.weight * d * d;
  });

  double hat = 0.0;
  double check = 0.0;
  if (mn == mp) {
    for (int e : mn->interior_edges()) {
      const double h = mn->edge_length(e);
      const auto& v = mn->edge(e).vertices;
      hat += h * h * h *
             segment_square_integral(mn->vertex(v[0]), mn->vertex(v[1]), deg, [&](const Point& x) {
               return (current.jump_at(e, x) - previous.jump_at(e, x)) / tau;
             });
    }
  } else {
    const auto cr = common_refinement(mn, mp);
    const TriangleMesh& fine = cr->fine();
    const TriangleMesh& coarse = cr->coarse();
    for (int fe : fine.interior_edges()) {
      const int en = cr->edge_in(*mn, fe);
      const int ep = cr->edge_in(*mp, fe);
      const int ce = cr->coarse_edge(fe);
      const double coarse_measure =
          ce >= 0 ? coarse.edge_length(ce) : coarse.diameter(cr->coarse_element(fine.edge(fe).left));
      const double h = std::max(fine.edge_length(fe), coarse_measure);
      const auto& v = fine.edge(fe).vertices;
      const double s =
          h * h * h *
          segment_square_integral(fine.vertex(v[0]), fine.vertex(v[1]), deg, [&](const Point& x) {
            const double jn = en >= 0 ? current.jump_at(en, x) : 0.0;
            const double jp = ep >= 0 ? previous.jump_at(ep, x) : 0.0;
            return (jn - jp) / tau;
          });
      if (en >= 0 && ep >= 0)
        hat += s;
      else
        check += s;
    }
  }
  return c.c62 * std::sqrt(inner) + c.c102 * std::sqrt(hat) + c.c142 * std::sqrt(check);
}

double eta_n(const DiscreteSolution& sol, int n, const EstimatorConstants& c) {
  if (n < 1 || n > sol.steps()) throw DomainError("step index out of range");
  return eta_n(compute_residuals(sol, n), compute_residuals(sol, n - 1), sol.partition.tau(n), c);
}

DofVector time_indicator_data(const DiscreteSolution& sol, int n) {
  if (n == 0) return discrete_elliptic(sol, 0);
  const DofVector d = averaged_discrete_derivative(sol, n);
  return DofVector(sol.space(n), sol.projected_loads[n].coefficients - d.coefficients);
}

namespace {
double theta_factor(const EstimatorConstants& c) { return c.half_factor_theta ? 0.5 : 1.0; }
}  // namespace

double theta_n(const DiscreteSolution& sol, int n, const EstimatorConstants& c) {
  if (n < 1 || n > sol.steps()) throw DomainError("step index out of range");
  return theta_factor(c) * l2_distance(time_indicator_data(sol, n - 1), time_indicator_data(sol, n));
}

double theta_direct_n(const DiscreteSolution& sol, int n, const EstimatorConstants& c) {
  if (n < 1 || n > sol.steps()) throw DomainError("step index out of range");
  return theta_factor(c) * l2_distance(discrete_elliptic(sol, n - 1), discrete_elliptic(sol, n));
}

double theta_alt_n(const DiscreteSolution& sol, int n, double eta) {
  if (n < 1 || n > sol.steps()) throw DomainError("step index out of range");
  return l2_distance(sol.values[n - 1], sol.values[n]) + eta;
}

double gamma_n(const SpaceTimeFunction& f, const QuadratureCloud& cloud, double t0, double t1,
               RhsMode mode) {
  const SpatialFunction fhat = step_source(f, mode, t0, t1);
  const LineRule g = gauss_legendre(5, t0, t1);
  std::vector<double> sq(g.nodes.size(), 0.0);
  for (std::size_t p = 0; p < cloud.points.size(); ++p) {
    const Point& x = cloud.points[p];
    const double fh = fhat(x);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double d = fh - f(x, g.nodes[q]);
      sq[q] += cloud.weights[p] * d * d;
    }
  }
  double s = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] * std::sqrt(sq[q]);
  return s;
}

double source_dt_l1(const SpaceTimeFunction& f_dt, const QuadratureCloud& cloud, double t0,
                    double t1) {
  const LineRule g = gauss_legendre(5, t0, t1);
  double s = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const double t = g.nodes[q];
    s += g.weights[q] * std::sqrt(cloud.integrate([&](const Point& x) {
      const double v = f_dt(x, t);
      return v * v;
    }));
  }
  return s;
}

double beta_tilde(const std::vector<double>& gammas, const std::vector<double>& b, RhsMode mode) {
  const std::size_t m = gammas.size();
  if (m == 0) return 0.0;
  if (mode == RhsMode::endpoint) {
    double s = 0.0;
    for (double g : gammas) s += g;
    return s;
  }
  if (b.size() + 1 < m) throw SizeError("need b_1..b_{m-1} for the averaged data indicator");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) s += b[i] * gammas[i] * gammas[i];
  return gammas[m - 1] + 2.0 * std::sqrt(s);
}

MeshChange mesh_change_indicator(const DiscreteSolution& sol, int n, const SpaceTimeFunction& f,
                                 const IndicatorOptions& opts) {
  if (n < 1 || n > sol.steps()) throw DomainError("step index out of range");
  const SpacePtr& sn = sol.space(n);
  const SpacePtr& sp = sol.space(n - 1);
  const double tau = sol.partition.tau(n);
  const bool same_mesh = sn->mesh_ptr() == sp->mesh_ptr();
  const bool with_source = !(same_mesh && opts.restrict_static_mesh_change);

  const DofVector& prev = sol.values[n - 1];
  const DofVector pprev = l2_project(prev, sn);
  const DofVector& pf = sol.projected_loads[n];
  SpatialFunction fhat;
  if (with_source) fhat = step_source(f, sol.config.rhs_mode, sol.partition.t(n - 1), sol.partition.t(n));

  double s2 = 0.0;
  double s1 = 0.0;
  double s0 = 0.0;
  const MeshPtr& mn = sn->mesh_ptr();
  for_each_common_point(mn, sp->mesh_ptr(), opts.quadrature_degree, [&](const CommonPoint& p) {
    double g = (pprev.value(p.element_a, p.xi_a) - prev.value(p.element_b, p.xi_b)) / tau;
    if (with_source) g += pf.value(p.element_a, p.xi_a) - fhat(p.x);
    const double h = mn->diameter(p.element_a);
    const double w = p.weight * g * g;
    s0 += w;
    s1 += w * h * h;
    s2 += w * h * h * h * h;
  });
  return {std::sqrt(s2), std::sqrt(s1), std::sqrt(s0)};
}

std::vector<StepIndicators> compute_indicator_history(const DiscreteSolution& sol,
                                                      const Problem& problem,
                                                      const IndicatorOptions& opts) {
  const EstimatorConstants& c = opts.constants;
  c.validate();
  const int steps = sol.steps();
  const QuadratureCloud cloud =
      QuadratureCloud::on_mesh(*uniform_square_mesh(opts.data_level), opts.data_degree);
  std::vector<StepIndicators> out(steps + 1);

  ResidualData prev = compute_residuals(sol, 0);
  DofVector d_prev = prev.elliptic;
  out[0].eps = epsilon_n(prev, c);
  for (int n = 1; n <= steps; ++n) {
    ResidualData cur = compute_residuals(sol, n);
    StepIndicators& s = out[n];
    const double t0 = sol.partition.t(n - 1);
    const double t1 = sol.partition.t(n);
    s.eps = epsilon_n(cur, c);
    s.eta = eta_n(cur, prev, t1 - t0, c);
    DofVector d = time_indicator_data(sol, n);
    s.theta = theta_factor(c) * l2_distance(d_prev, d);
    s.theta_alt = l2_distance(sol.values[n - 1], sol.values[n]) + s.eta;
    s.gamma = gamma_n(problem.source, cloud, t0, t1, sol.config.rhs_mode);
    s.source_dt = problem.source_dt ? source_dt_l1(problem.source_dt, cloud, t0, t1)
                                    : std::numeric_limits<double>::quiet_NaN();
    const MeshChange mc = mesh_change_indicator(sol, n, problem.source, opts);
    s.mc_h2 = mc.h2;
    s.mc_h1 = mc.h1;
    s.beta = mc.l2;
    prev = std::move(cur);
    d_prev = std::move(d);
  }
  return out;
}

}  // namespace parest
