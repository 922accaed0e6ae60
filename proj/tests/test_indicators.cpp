#include <gtest/gtest.h>

#include <cmath>

#include "parest/bench.hpp"
#include "parest/errors.hpp"
#include "parest/indicators.hpp"

using namespace parest;

namespace {

Problem zero_problem() {
  Problem p;
  p.source = [](const Point&, double) { return 0.0; };
  p.initial = [](const Point&) { return 0.0; };
  return p;
}

// A discrete trajectory that stays at the steady state of a time-constant source.
DiscreteSolution steady_solution(int steps) {
  Problem p;
  p.source = [](const Point& x, double) { return 1 + x.x() * x.y(); };
  p.initial = [](const Point&) { return 0.0; };
  SchemeConfig cfg;
  cfg.level = 3;
  DiscreteSolution sol = run(p, cfg, TimePartition::uniform(1.0, steps));
  const SpacePtr& s = sol.space(0);
  const LinearSolver solver(*sol.stiffness[0], SolverOptions{});
  const DofVector steady(s, solver.solve(sol.loads[1]));
  for (DofVector& v : sol.values) v = steady;
  return sol;
}

}  // namespace

TEST(Indicators, AffineFunctionHasNoInteriorJumps) {
  const SpacePtr s = make_space(uniform_square_mesh(2), 1, false);
  const DofVector u = interpolate([](const Point& x) { return 2 * x.x() - x.y(); }, s);
  const ResidualData r = compute_residuals(u, discrete_elliptic_apply(u, DiffusionMatrix::identity()),
                                           DiffusionMatrix::identity());
  for (int e : s->mesh().interior_edges()) EXPECT_NEAR(r.edge_jump[e], 0.0, 1e-13);
}

TEST(Indicators, ZeroSolutionZeroData) {
  const DiscreteSolution sol = run(zero_problem(), SchemeConfig{}, TimePartition::uniform(1.0, 3));
  const EstimatorConstants c;
  EXPECT_EQ(epsilon_n(compute_residuals(sol, 2), c), 0.0);
  EXPECT_EQ(eta_n(sol, 2, c), 0.0);
  EXPECT_EQ(theta_n(sol, 2, c), 0.0);
  EXPECT_EQ(theta_alt_n(sol, 2, 0.0), 0.0);
  const IndicatorOptions o;
  const MeshChange mc = mesh_change_indicator(sol, 1, zero_problem().source, o);
  EXPECT_EQ(mc.l2, 0.0);
}

TEST(Indicators, SteadyStateHasNoTimeOrSpaceChange) {
  const DiscreteSolution sol = steady_solution(3);
  const EstimatorConstants c;
  for (int n = 2; n <= 3; ++n) {
    EXPECT_LE(eta_n(sol, n, c), 1e-12);
    EXPECT_LE(theta_n(sol, n, c), 1e-9);
    const double eta = 0.25;
    EXPECT_NEAR(theta_alt_n(sol, n, eta), eta, 1e-12);
  }
}

TEST(Indicators, TimeConstantSourceHasNoDataError) {
  const QuadratureCloud cloud = QuadratureCloud::on_mesh(*uniform_square_mesh(2), 4);
  const auto f = [](const Point& x, double) { return std::sin(x.x()); };
  for (RhsMode mode : {RhsMode::endpoint, RhsMode::time_average})
    EXPECT_NEAR(gamma_n(f, cloud, 0.3, 0.7, mode), 0.0, 1e-14);
  EXPECT_EQ(beta_tilde({0, 0, 0}, {1, 1}, RhsMode::time_average), 0.0);
  EXPECT_EQ(beta_tilde({0, 0, 0}, {}, RhsMode::endpoint), 0.0);
  EXPECT_THROW(beta_tilde({1, 1, 1}, {1}, RhsMode::time_average), SizeError);
}

TEST(Indicators, StaticMeshChangeVanishes) {
  const BenchmarkProblem bp{1, 0.2};
  SchemeConfig cfg;
  cfg.level = 2;
  const DiscreteSolution sol = run(bp.problem(), cfg, TimePartition::uniform(0.2, 2));
  IndicatorOptions o;
  const MeshChange a = mesh_change_indicator(sol, 2, bp.problem().source, o);
  EXPECT_NEAR(a.l2, 0.0, 1e-12);
  // Without the restriction the source projection error remains.
  o.restrict_static_mesh_change = false;
  EXPECT_GT(mesh_change_indicator(sol, 2, bp.problem().source, o).l2, 1e-3);
}

TEST(Indicators, EpsilonScalesWithConstants) {
  const BenchmarkProblem bp{1, 0.2};
  SchemeConfig cfg;
  cfg.level = 2;
  const DiscreteSolution sol = run(bp.problem(), cfg, TimePartition::uniform(0.2, 2));
  const ResidualData r = compute_residuals(sol, 2);
  EstimatorConstants c;
  const double base = epsilon_n(r, c);
  c.c62 = 3.0;
  c.c102 = 3.0;
  EXPECT_NEAR(epsilon_n(r, c), 3 * base, 1e-12 * base);
}

TEST(Indicators, ThetaHalfFactor) {
  const BenchmarkProblem bp{1, 0.2};
  SchemeConfig cfg;
  cfg.level = 2;
  const DiscreteSolution sol = run(bp.problem(), cfg, TimePartition::uniform(0.2, 3));
  EstimatorConstants c;
  const double half = theta_n(sol, 2, c);
  c.half_factor_theta = false;
  EXPECT_NEAR(theta_n(sol, 2, c), 2 * half, 1e-14);
}

TEST(Indicators, HistoryMatchesSingleIndicators) {
  const BenchmarkProblem bp{2, 0.25};
  SchemeConfig cfg;
  cfg.level = 2;
  const Problem p = bp.problem();
  const DiscreteSolution sol = run(p, cfg, TimePartition::uniform(0.25, 5));
  const IndicatorOptions o;
  const auto h = compute_indicator_history(sol, p, o);
  ASSERT_EQ(h.size(), 6u);
  EXPECT_NEAR(h[0].eps, epsilon_n(compute_residuals(sol, 0), o.constants), 1e-15);
  for (int n = 1; n <= 5; ++n) {
    EXPECT_NEAR(h[n].eta, eta_n(sol, n, o.constants), 1e-12 * h[n].eta);
    EXPECT_NEAR(h[n].theta, theta_n(sol, n, o.constants), 1e-12 * h[n].theta);
    EXPECT_NEAR(h[n].theta_alt, theta_alt_n(sol, n, h[n].eta), 1e-12 * h[n].theta_alt);
    EXPECT_GE(h[n].gamma, 0.0);
    EXPECT_TRUE(std::isfinite(h[n].source_dt));
  }
}

TEST(Indicators, HistoryOnLevelScheduleIncludesMeshChange) {
  const BenchmarkProblem bp{1, 0.2};
  SchemeConfig cfg;
  cfg.levels = {3, 3, 2, 2};
  const Problem p = bp.problem();
  const DiscreteSolution sol = run(p, cfg, TimePartition::uniform(0.2, 3));
  const auto h = compute_indicator_history(sol, p, IndicatorOptions{});
  EXPECT_GT(h[2].beta, 0.0);
  EXPECT_LT(h[2].mc_h2, h[2].mc_h1);
  EXPECT_LT(h[2].mc_h1, h[2].beta);
}

TEST(Indicators, ConstantsValidation) {
  EstimatorConstants c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_NEAR(c.a_rate(), M_PI * M_PI / 2, 1e-12);
  c.c_pf = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.c_pf = 1.0;
  c.alpha = std::nan("");
  EXPECT_THROW(c.validate(), ConfigError);
}
