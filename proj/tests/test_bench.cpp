#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "parest/bench.hpp"
#include "parest/errors.hpp"

using namespace parest;

TEST(Bench, SourceAtInitialTime) {
  for (int kappa : {1, 3}) {
    const Point x(0.3, -0.2);
    EXPECT_NEAR(exact_source(kappa)(x, 0.0), kappa * std::numbers::pi * std::exp(-10 * x.squaredNorm()), 1e-14);
    EXPECT_EQ(exact_solution(kappa)(x, 0.0), 0.0);
  }
  EXPECT_THROW(exact_source(0), DomainError);
}

TEST(Bench, ErrorOfExactlyReproducedSolution) {
  // A space function held constant in time as its own exact solution.
  const SpacePtr s = make_space(uniform_square_mesh(2));
  const auto g = [](const Point& x) { return (1 - std::abs(x.x())) * (1 - std::abs(x.y())); };
  DiscreteSolution sol;
  sol.partition = TimePartition::uniform(1.0, 1);
  sol.values = {interpolate(g, s), interpolate(g, s)};
  const SpaceTimeFunction exact = [g](const Point& x, double) { return g(x); };
  // g is piecewise bilinear, not P1, so compare against an interpolated copy instead.
  const SpacePtr fine = make_space(uniform_square_mesh(2));
  const DofVector u = interpolate(g, fine);
  const SpaceTimeFunction in_space = [&u](const Point& x, double) {
    const PointLocator loc(u.space->mesh());
    const int k = loc.locate(x);
    return u.value(k, u.space->mesh().geometry(k).pullback(x));
  };
  EXPECT_LE(l2_error_at_node(sol, 1, in_space, 4), 1e-11);
}

TEST(Bench, ZeroInitialDataHasZeroInitialError) {
  StudyConfig c;
  const DiscreteSolution sol = run(c.problem.problem(), c.scheme, TimePartition::uniform(1.0, 2));
  EXPECT_EQ(l2_error_at_node(sol, 0, exact_solution(1)), 0.0);
}

TEST(Bench, MaxInTimeError) {
  EXPECT_EQ(linf_l2_error({0.1, 0.2, 0.3}, 2), 0.3);
  EXPECT_EQ(linf_l2_error({0.3, 0.2, 0.1}, 2), 0.3);
  EXPECT_EQ(linf_l2_error({0.0, 0.0}, 1), 0.0);
  EXPECT_THROW(linf_l2_error({0.1}, 1), SizeError);
}

TEST(Bench, EocExamples) {
  EXPECT_DOUBLE_EQ(eoc({4, 1}, {2, 1}, 0), 2.0);
  EXPECT_EQ(eoc({1, 1}, {2, 1}, 0), 0.0);
  EXPECT_THROW(eoc({0, 1}, {2, 1}, 0), DomainError);
  EXPECT_THROW(eoc({1, 1}, {1, 1}, 0), DomainError);
  EXPECT_THROW(eoc({1, 1}, {2, 1}, 1), SizeError);
}

TEST(Bench, CoupledSteps) {
  EXPECT_EQ(coupled_steps(1.0, 0.05, 0.5), 40);
  EXPECT_EQ(coupled_steps(1.0, 0.05, 0.3), 67);
  EXPECT_THROW(coupled_steps(1.0, 0.0, 0.3), DomainError);
}

TEST(Bench, FormatValue) {
  EXPECT_EQ(format_value(0.5), "5.0000000000000000e-01");
  EXPECT_EQ(format_value(std::nan("")), "NA");
  EXPECT_EQ(format_value(INFINITY), "NA");
}

TEST(Bench, SmallStudyOutputs) {
  StudyConfig c;
  c.levels = {1, 2};
  c.ei_modes = {EiMode::experiment, EiMode::full_bound};
  const ConvergenceStudy s = run_study(c);
  ASSERT_EQ(s.levels.size(), 2u);
  ASSERT_EQ(s.summary.size(), 2u);
  EXPECT_TRUE(std::isnan(s.summary[0].eoc_error));
  EXPECT_TRUE(std::isfinite(s.summary[1].eoc_error));
  const LevelResult& l = s.levels[1];
  EXPECT_EQ(l.steps, coupled_steps(1.0, 0.05, l.h));
  EXPECT_EQ(static_cast<int>(l.rows.size()), l.steps + 1);
  EXPECT_LE(l.boundary_trace, std::exp(-10.0) + 1e-15);
  for (const StepRow& r : l.rows) ASSERT_EQ(r.ei.size(), 2u);
  std::stringstream csv;
  write_level_csv(csv, l, 1);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header,
            "n,t_n,error_L2,eps_n,eta_n,theta_n,gamma_n,beta_n,duality_total,duality_max_total,energy_total,"
            "inv_EI_duality,inv_EI_max,inv_EI_energy");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  EXPECT_EQ(lines, l.steps + 1);
  std::stringstream sum;
  write_summary_csv(sum, s);
  std::getline(sum, header);
  EXPECT_EQ(header, "level,h,tau,max_error,EOC_error,EOC_eps,EOC_theta");
  c.levels = {2, 2};
  EXPECT_THROW(run_study(c), ConfigError);
}
