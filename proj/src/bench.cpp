#include "parest/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "parest/errors.hpp"
#include "parest/quadrature.hpp"

namespace parest {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double BenchmarkProblem::exact(const Point& x, double t) const {
  return std::sin(kappa * kPi * t) * std::exp(-10.0 * x.squaredNorm());
}

double BenchmarkProblem::source(const Point& x, double t) const {
  const double r2 = x.squaredNorm();
  const double w = kappa * kPi;
  return std::exp(-10.0 * r2) * (w * std::cos(w * t) + (40.0 - 400.0 * r2) * std::sin(w * t));
}

double BenchmarkProblem::source_dt(const Point& x, double t) const {
  const double r2 = x.squaredNorm();
  const double w = kappa * kPi;
  return std::exp(-10.0 * r2) * w * (-w * std::sin(w * t) + (40.0 - 400.0 * r2) * std::cos(w * t));
}

Problem BenchmarkProblem::problem() const {
  const BenchmarkProblem p = *this;
  Problem out;
  out.source = [p](const Point& x, double t) { return p.source(x, t); };
  out.source_dt = [p](const Point& x, double t) { return p.source_dt(x, t); };
  out.initial = [p](const Point& x) { return p.exact(x, 0.0); };
  return out;
}

SpaceTimeFunction exact_source(int kappa) {
  if (kappa < 1) throw DomainError("kappa must be a positive integer");
  const BenchmarkProblem p{kappa, 1.0};
  return [p](const Point& x, double t) { return p.source(x, t); };
}

SpaceTimeFunction exact_solution(int kappa) {
  if (kappa < 1) throw DomainError("kappa must be a positive integer");
  const BenchmarkProblem p{kappa, 1.0};
  return [p](const Point& x, double t) { return p.exact(x, t); };
}

double l2_error_at_node(const DiscreteSolution& sol, int n, const SpaceTimeFunction& exact,
                        int quadrature_degree) {
  const DofVector& u = sol.values.at(n);
  const TriangleMesh& mesh = u.space->mesh();
  const TriangleRule& rule = triangle_rule(quadrature_degree);
  const double t = sol.partition.t(n);
  const int nloc = u.space->dofs_per_element();
  std::vector<Eigen::VectorXd> phi(rule.points.size(), Eigen::VectorXd(nloc));
  for (std::size_t q = 0; q < rule.points.size(); ++q) u.space->reference().values(rule.points[q], phi[q]);
  double s = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const ElementGeometry g = mesh.geometry(k);
    const Eigen::VectorXd c = u.local(k);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double d = phi[q].dot(c) - exact(g.map(rule.points[q]), t);
      local += rule.weights[q] * d * d;
    }
    s += g.det * local;
  }
  return std::sqrt(s);
}

std::vector<double> node_errors(const DiscreteSolution& sol, const SpaceTimeFunction& exact,
                                int quadrature_degree) {
  std::vector<double> e(sol.steps() + 1);
  for (int n = 0; n <= sol.steps(); ++n) e[n] = l2_error_at_node(sol, n, exact, quadrature_degree);
  return e;
}

double linf_l2_error(const std::vector<double>& errors, int m) {
  if (m < 0 || m >= static_cast<int>(errors.size())) throw SizeError("error history too short");
  return *std::max_element(errors.begin(), errors.begin() + m + 1);
}

double eoc(const std::vector<double>& values, const std::vector<double>& h, int i) {
  if (values.size() != h.size()) throw SizeError("EOC inputs differ in length");
  if (i < 0 || i + 1 >= static_cast<int>(values.size())) throw SizeError("EOC index out of range");
  if (!(values[i] > 0.0) || !(values[i + 1] > 0.0) || !(h[i] > 0.0) || !(h[i + 1] > 0.0))
    throw DomainError("EOC needs positive values and mesh sizes");
  if (h[i] == h[i + 1]) throw DomainError("EOC needs distinct mesh sizes");
  return std::log(values[i + 1] / values[i]) / std::log(h[i + 1] / h[i]);
}

int coupled_steps(double final_time, double c_tau, double h) {
  if (!(final_time > 0.0) || !(c_tau > 0.0) || !(h > 0.0))
    throw DomainError("time coupling needs positive T, c_tau and h");
  // Tolerate round-off when T / (c_tau h) is an integer.
  return std::max(1, static_cast<int>(std::ceil(final_time / (c_tau * h) - 1e-9)));
}

LevelResult run_level(const StudyConfig& config, int level) {
  const BenchmarkProblem& bp = config.problem;
  const Problem problem = bp.problem();
  const double h = mesh_size_max(*uniform_square_mesh(level));
  const int steps = coupled_steps(bp.final_time, config.c_tau, h);
  const TimePartition partition = TimePartition::uniform(bp.final_time, steps);
  SchemeConfig scheme = config.scheme;
  scheme.level = level;
  scheme.levels.clear();

  const DiscreteSolution sol = run(problem, scheme, partition);
  const SpaceTimeFunction exact = [bp](const Point& x, double t) { return bp.exact(x, t); };
  const std::vector<double> errors = node_errors(sol, exact, scheme.quadrature_degree);
  std::vector<StepIndicators> history = compute_indicator_history(sol, problem, config.indicators);
  const EstimatorState state = make_estimator_state(partition, std::move(history), errors[0],
                                                    config.indicators.constants, scheme.rhs_mode);

  LevelResult r;
  r.level = level;
  r.h = h;
  r.tau = partition.tau(1);
  r.steps = steps;
  for (int n = 0; n <= steps; ++n) {
    StepRow row;
    row.n = n;
    row.t = partition.t(n);
    row.error = errors[n];
    row.ind = state.history[n];
    if (n == 0) {
      row.duality_total = row.duality_max_total = row.energy_total = kNaN;
      row.ind.eta = row.ind.theta = row.ind.theta_alt = row.ind.gamma = kNaN;
      row.ind.beta = row.ind.mc_h1 = row.ind.mc_h2 = row.ind.source_dt = kNaN;
      row.ei.assign(config.ei_modes.size(), {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN});
    } else {
      row.duality_total = duality_total(state, n);
      row.duality_max_total =
          scheme.rhs_mode == RhsMode::time_average ? duality_max_total(state, n) : kNaN;
      row.energy_total = energy_total(state, n);
      for (EiMode mode : config.ei_modes) row.ei.push_back(effectivity_indices(state, errors, n, mode));
    }
    r.rows.push_back(std::move(row));
    r.max_error = std::max(r.max_error, errors[n]);
    r.max_eps = std::max(r.max_eps, state.history[n].eps);
    if (n > 0) r.max_theta = std::max(r.max_theta, state.history[n].theta);
  }
  const TriangleMesh& mesh = sol.space(0)->mesh();
  for (int n = 0; n <= steps; ++n)
    for (int v = 0; v < mesh.num_vertices(); ++v)
      if (mesh.is_boundary_vertex(v))
        r.boundary_trace = std::max(r.boundary_trace, std::abs(bp.exact(mesh.vertex(v), partition.t(n))));
  return r;
}

ConvergenceStudy run_study(const StudyConfig& config) {
  if (config.levels.empty()) throw ConfigError("study needs at least one level");
  for (std::size_t i = 1; i < config.levels.size(); ++i)
    if (config.levels[i] <= config.levels[i - 1]) throw ConfigError("levels must be strictly increasing");
  ConvergenceStudy study;
  study.config = config;
  for (int level : config.levels) study.levels.push_back(run_level(config, level));

  std::vector<double> hs;
  std::vector<double> err;
  std::vector<double> eps;
  std::vector<double> theta;
  for (const LevelResult& l : study.levels) {
    hs.push_back(l.h);
    err.push_back(l.max_error);
    eps.push_back(l.max_eps);
    theta.push_back(l.max_theta);
  }
  const auto safe_eoc = [&](const std::vector<double>& v, int i) {
    try {
      return eoc(v, hs, i);
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  for (std::size_t i = 0; i < study.levels.size(); ++i) {
    const LevelResult& l = study.levels[i];
    SummaryRow s{l.level, l.h, l.tau, l.max_error, kNaN, kNaN, kNaN};
    if (i > 0) {
      const int j = static_cast<int>(i) - 1;
      s.eoc_error = safe_eoc(err, j);
      s.eoc_eps = safe_eoc(eps, j);
      s.eoc_theta = safe_eoc(theta, j);
    }
    study.summary.push_back(s);
  }
  return study;
}

std::string format_value(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_level_csv(std::ostream& out, const LevelResult& level, std::size_t mode_index) {
  out << "n,t_n,error_L2,eps_n,eta_n,theta_n,gamma_n,beta_n,duality_total,duality_max_total,"
         "energy_total,inv_EI_duality,inv_EI_max,inv_EI_energy\n";
  for (const StepRow& r : level.rows) {
    const EffectivityIndices& ei = r.ei.at(mode_index);
    out << r.n;
    for (double v : {r.t, r.error, r.ind.eps, r.ind.eta, r.ind.theta, r.ind.gamma, r.ind.beta,
                     r.duality_total, r.duality_max_total, r.energy_total, ei.inv_duality,
                     ei.inv_duality_max, ei.inv_energy})
      out << ',' << format_value(v);
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "level,h,tau,max_error,EOC_error,EOC_eps,EOC_theta\n";
  for (const SummaryRow& s : study.summary) {
    out << s.level;
    for (double v : {s.h, s.tau, s.max_error, s.eoc_error, s.eoc_eps, s.eoc_theta})
      out << ',' << format_value(v);
    out << '\n';
  }
}

void write_report(std::ostream& out, const ConvergenceStudy& study) {
  const StudyConfig& c = study.config;
  out << "kappa = " << c.problem.kappa << '\n';
  out << "T = " << format_value(c.problem.final_time) << '\n';
  out << "c_tau = " << format_value(c.c_tau) << '\n';
  out << "rhs_mode = " << to_string(c.scheme.rhs_mode) << '\n';
  out << "initial_mode = " << to_string(c.scheme.initial_mode) << '\n';
  out << "quadrature_degree = " << c.scheme.quadrature_degree << '\n';
  out << "solver = " << to_string(c.scheme.solver.kind) << '\n';
  // Homogeneous Dirichlet data is imposed although u does not vanish there.
  out << "boundary_trace_bound = " << format_value(std::exp(-10.0)) << '\n';
  for (const LevelResult& l : study.levels) {
    out << "level " << l.level << ": N = " << l.steps << ", h = " << format_value(l.h)
        << ", tau = " << format_value(l.tau)
        << ", boundary_trace_max = " << format_value(l.boundary_trace) << '\n';
  }
}

void write_study(const ConvergenceStudy& study, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
  };
  for (const LevelResult& l : study.levels) {
    for (std::size_t i = 0; i < study.config.ei_modes.size(); ++i) {
      auto f = open(dir / ("level" + std::to_string(l.level) + "_" +
                           to_string(study.config.ei_modes[i]) + ".csv"));
      write_level_csv(f, l, i);
    }
  }
  auto s = open(dir / "summary.csv");
  write_summary_csv(s, study);
  auto r = open(dir / "report.txt");
  write_report(r, study);
}

}  // namespace parest
