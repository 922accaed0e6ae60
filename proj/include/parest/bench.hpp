#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "parest/estimators.hpp"

namespace parest {

/// u(x,t) = sin(kappa pi t) exp(-10 |x|^2) on [-1,1]^2 with A = I.
struct BenchmarkProblem {
  int kappa = 1;
  double final_time = 1.0;

  double exact(const Point& x, double t) const;
  double source(const Point& x, double t) const;
  double source_dt(const Point& x, double t) const;
  Problem problem() const;
};

/// f = exp(-10 r^2) [kappa pi cos(kappa pi t) + (40 - 400 r^2) sin(kappa pi t)].
SpaceTimeFunction exact_source(int kappa);
SpaceTimeFunction exact_solution(int kappa);

/// ||U^n - u(t_n)|| by elementwise quadrature of the given degree.
double l2_error_at_node(const DiscreteSolution& sol, int n, const SpaceTimeFunction& exact,
                        int quadrature_degree = 8);
std::vector<double> node_errors(const DiscreteSolution& sol, const SpaceTimeFunction& exact,
                                int quadrature_degree = 8);
/// max_{n <= m} of node errors.
double linf_l2_error(const std::vector<double>& errors, int m);

/// log(v(i+1)/v(i)) / log(h(i+1)/h(i)). DomainError for nonpositive
/// values or equal sizes.
double eoc(const std::vector<double>& values, const std::vector<double>& h, int i);

/// Number of uniform steps for tau close to c_tau * h: N = ceil(T / (c_tau h)).
int coupled_steps(double final_time, double c_tau, double h);

struct StudyConfig {
  BenchmarkProblem problem;
  std::vector<int> levels{2, 3, 4, 5};
  double c_tau = 0.05;
  SchemeConfig scheme;
  IndicatorOptions indicators;
  std::vector<EiMode> ei_modes{EiMode::experiment};
};

struct StepRow {
  int n = 0;
  double t = 0.0;
  double error = 0.0;
  StepIndicators ind;
  double duality_total = 0.0;
  double duality_max_total = 0.0;
  double energy_total = 0.0;
  /// One entry per configured EI mode.
  std::vector<EffectivityIndices> ei;
};

struct LevelResult {
  int level = 0;
  double h = 0.0;
  double tau = 0.0;
  int steps = 0;
  std::vector<StepRow> rows;  // n = 0..N
  double max_error = 0.0;
  double max_eps = 0.0;
  double max_theta = 0.0;
  /// Largest |u| over boundary vertices and time nodes (enforced as zero).
  double boundary_trace = 0.0;
};

struct SummaryRow {
  int level = 0;
  double h = 0.0;
  double tau = 0.0;
  double max_error = 0.0;
  double eoc_error = 0.0;  // NaN on the first level
  double eoc_eps = 0.0;
  double eoc_theta = 0.0;
};

struct ConvergenceStudy {
  StudyConfig config;
  std::vector<LevelResult> levels;
  std::vector<SummaryRow> summary;
};

LevelResult run_level(const StudyConfig& config, int level);
ConvergenceStudy run_study(const StudyConfig& config);

/// "%.16e", or "NA" for non-finite values.
std::string format_value(double v);

void write_level_csv(std::ostream& out, const LevelResult& level, std::size_t mode_index);
void write_summary_csv(std::ostream& out, const ConvergenceStudy& study);
void write_report(std::ostream& out, const ConvergenceStudy& study);
/// Writes level<i>_<mode>.csv, summary.csv and report.txt into dir.
void write_study(const ConvergenceStudy& study, const std::filesystem::path& dir);

}  // namespace parest
