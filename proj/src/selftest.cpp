#include "parest/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "parest/bench.hpp"
#include "parest/errors.hpp"

namespace parest {

namespace {

struct Check {
  std::string name;
  std::function<std::string()> body;  // empty string on success
};

std::string expect(bool cond, const std::string& detail) { return cond ? "" : detail; }

std::string num(double v) { return format_value(v); }

TimePartition random_partition(std::mt19937_64& rng, int steps, double final_time) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(steps);
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  std::vector<double> nodes{0.0};
  double acc = 0.0;
  for (int i = 0; i < steps - 1; ++i) nodes.push_back((acc += w[i]) * final_time / total);
  nodes.push_back(final_time);
  return TimePartition(std::move(nodes));
}

std::vector<Check> checks() {
  std::vector<Check> c;
  c.push_back({"mesh euler relation", [] {
                 for (int l = 0; l <= 4; ++l) {
                   const MeshPtr m = uniform_square_mesh(l);
                   if (m->num_vertices() - m->num_edges() + m->num_triangles() != 1)
                     return "level " + std::to_string(l);
                 }
                 return std::string();
               }});
  c.push_back({"mesh size halves", [] {
                 const double h0 = mesh_size_max(*uniform_square_mesh(0));
                 const double h3 = mesh_size_max(*uniform_square_mesh(3));
                 return expect(std::abs(h0 - 2.0 * std::sqrt(2.0)) < 1e-14 && std::abs(h3 - h0 / 8) < 1e-14,
                               num(h0) + " " + num(h3));
               }});
  c.push_back({"mass of constant", [] {
                 const SpacePtr s = make_space(uniform_square_mesh(2), 1, false);
                 const Vector one = Vector::Ones(s->num_dofs());
                 const double v = one.dot(s->mass().apply(one));
                 return expect(std::abs(v - 4.0) < 1e-12, num(v));
               }});
  c.push_back({"stiffness kernel", [] {
                 const SpacePtr s = make_space(uniform_square_mesh(2), 1, false);
                 const SparseOperator k = assemble_stiffness(*s, DiffusionMatrix::identity());
                 const double v = k.apply(Vector::Ones(s->num_dofs())).cwiseAbs().maxCoeff();
                 return expect(v < 1e-12, num(v));
               }});
  c.push_back({"galerkin consistency", [] {
                 const SpacePtr s = make_space(uniform_square_mesh(3));
                 const SparseOperator k = assemble_stiffness(*s, DiffusionMatrix::identity());
                 std::mt19937_64 rng(7);
                 std::uniform_real_distribution<double> u(-1, 1);
                 Vector v(s->num_dofs());
                 for (auto& x : v) x = u(rng);
                 const DofVector w = discrete_elliptic_apply(DofVector(s, v), k);
                 const Vector kv = k.apply(v);
                 const double d = (s->mass().apply(w.coefficients) - kv).cwiseAbs().maxCoeff();
                 return expect(d <= 1e-10 * kv.cwiseAbs().maxCoeff(), num(d));
               }});
  c.push_back({"projection reproduces linears", [] {
                 const SpacePtr s = make_space(uniform_square_mesh(2), 1, false);
                 const DofVector p = l2_project([](const Point& x) { return x.x(); }, s, 4);
                 double d = 0.0;
                 for (int i = 0; i < s->num_dofs(); ++i)
                   d = std::max(d, std::abs(p.coefficients[i] - s->node_coordinate(s->node_of_dof(i)).x()));
                 return expect(d < 1e-11, num(d));
               }});
  c.push_back({"duality coefficient identities", [] {
                 std::mt19937_64 rng(11);
                 for (int trial = 0; trial < 10; ++trial) {
                   const TimePartition p = random_partition(rng, 2 + 37 * trial, 1.0 + trial);
                   const DualityCoefficients dc = duality_coeffs(p);
                   double sa = 0.0;
                   double sb = 0.0;
                   for (double a : dc.a) sa += a;
                   for (double b : dc.b) sb += b;
                   const double lg = std::log(p.final_time() / p.tau(p.steps()));
                   if (std::abs(sa - lg) > 1e-10 || std::abs(sb - 0.25 * (0.5 + lg)) > 1e-10 ||
                       dc.b.back() != 0.125)
                     return "trial " + std::to_string(trial);
                 }
                 return std::string();
               }});
  c.push_back({"energy incremental equals batch", [] {
                 std::mt19937_64 rng(13);
                 const TimePartition p = random_partition(rng, 100, 3.0);
                 std::uniform_real_distribution<double> u(0.0, 1.0);
                 const double a = 2.5;
                 EnergyAccumulator acc(a, 0.0);
                 std::vector<double> s(101);
                 for (int n = 1; n <= 100; ++n) {
                   s[n] = u(rng);
                   acc.update(p.tau(n), 0.0, s[n], 0.0, 0.0, 0.0);
                 }
                 double batch = 0.0;
                 for (int n = 1; n <= 100; ++n) batch += s[n] * energy_coeff(n, 100, a, p);
                 return expect(std::abs(acc.e1() - batch) <= 1e-12 * batch, num(acc.e1()) + " vs " + num(batch));
               }});
  c.push_back({"manufactured source", [] {
                 const BenchmarkProblem bp{3, 1.0};
                 const double h = 1e-3;
                 double worst = 0.0;
                 for (double t : {0.1, 0.37, 0.8}) {
                   for (const Point& x : {Point(0.1, 0.2), Point(-0.3, 0.05), Point(0.4, -0.4)}) {
                     const double ut = (bp.exact(x, t + h) - bp.exact(x, t - h)) / (2 * h);
                     const Point ex(h, 0), ey(0, h);
                     const double lap = (bp.exact(x + ex, t) + bp.exact(x - ex, t) + bp.exact(x + ey, t) +
                                         bp.exact(x - ey, t) - 4 * bp.exact(x, t)) / (h * h);
                     worst = std::max(worst, std::abs(ut - lap - bp.source(x, t)));
                   }
                 }
                 return expect(worst < 1e-3, num(worst));
               }});
  c.push_back({"pointwise discrete form", [] {
                 const BenchmarkProblem bp{1, 0.2};
                 SchemeConfig cfg;
                 cfg.level = 3;
                 const DiscreteSolution sol = run(bp.problem(), cfg, TimePartition::uniform(0.2, 8));
                 for (int n = 1; n <= sol.steps(); ++n) {
                   const double r = pointwise_residual_norm(sol, n);
                   const double scale = l2_norm(sol.projected_loads[n]);
                   if (r > 1e-8 * scale + 1e-10) return "step " + std::to_string(n) + ": " + num(r);
                 }
                 return std::string();
               }});
  c.push_back({"zero data gives zero indicators", [] {
                 Problem p;
                 p.source = [](const Point&, double) { return 0.0; };
                 p.initial = [](const Point&) { return 0.0; };
                 SchemeConfig cfg;
                 cfg.level = 2;
                 const DiscreteSolution sol = run(p, cfg, TimePartition::uniform(1.0, 4));
                 const auto h = compute_indicator_history(sol, p, IndicatorOptions{});
                 for (const StepIndicators& s : h)
                   if (s.eps != 0.0 || s.eta != 0.0 || s.theta != 0.0 || s.gamma != 0.0 || s.beta != 0.0)
                     return std::string("nonzero indicator");
                 return std::string();
               }});
  return c;
}

}  // namespace

SelftestResult run_selftest(std::ostream& out) {
  SelftestResult r;
  for (const Check& c : checks()) {
    std::string detail;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      ++r.passed;
      out << "PASS " << c.name << '\n';
    } else {
      ++r.failed;
      out << "FAIL " << c.name << ": " << detail << '\n';
    }
  }
  out << r.passed << " passed, " << r.failed << " failed\n";
  return r;
}

}  // namespace parest
