#include "parest/timestepper.hpp"

#include <cmath>
#include <string>

#include "parest/errors.hpp"
#include "parest/quadrature.hpp"

namespace parest {

TimePartition::TimePartition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw DomainError("time partition needs at least one step");
  if (nodes_.front() != 0.0) throw DomainError("time partition must start at 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i]))
      throw DomainError("time nodes must be finite and strictly increasing");
}

TimePartition TimePartition::uniform(double final_time, int steps) {
  if (steps < 1) throw DomainError("uniform partition needs at least one step");
  if (!(final_time > 0.0)) throw DomainError("final time must be positive");
  std::vector<double> nodes(steps + 1);
  for (int n = 0; n <= steps; ++n) nodes[n] = final_time * n / steps;
  nodes[steps] = final_time;
  return TimePartition(std::move(nodes));
}

TimePartition TimePartition::truncated(int m) const {
  if (m < 1 || m > steps()) throw DomainError("truncation index out of range");
  return TimePartition(std::vector<double>(nodes_.begin(), nodes_.begin() + m + 1));
}

// ---------------------------------------------------------------- hierarchy

SpaceHierarchy::SpaceHierarchy(int degree, DiffusionMatrix diffusion, SolverOptions solver)
    : degree_(degree), diffusion_(diffusion), solver_(solver) {}

SpaceHierarchy::Entry& SpaceHierarchy::entry(int level) {
  auto it = entries_.find(level);
  if (it == entries_.end()) {
    Entry e;
    e.space = make_space(uniform_square_mesh(level), degree_, true, solver_);
    e.stiffness = std::make_shared<const SparseOperator>(assemble_stiffness(*e.space, diffusion_));
    it = entries_.emplace(level, std::move(e)).first;
  }
  return it->second;
}

const SpacePtr& SpaceHierarchy::space(int level) { return entry(level).space; }
const SparseOperator& SpaceHierarchy::stiffness(int level) { return *entry(level).stiffness; }

std::shared_ptr<const SparseOperator> SpaceHierarchy::stiffness_ptr(int level) {
  return entry(level).stiffness;
}

// ---------------------------------------------------------------- stepping

StepOperator::StepOperator(SpacePtr space, double tau, const SparseOperator& stiffness,
                           SolverOptions solver)
    : space_(std::move(space)),
      tau_(tau),
      system_{SparseMatrix(space_->mass().matrix / tau + stiffness.matrix), true},
      solver_(system_, solver) {
  if (!(tau > 0.0)) throw DomainError("time step must be positive");
}

DofVector StepOperator::step(const DofVector& prev, const Vector& load) const {
  const Vector rhs = load + mass_pairing(prev, *space_) / tau_;
  return DofVector(space_, solver_.solve(rhs));
}

DofVector initial_condition(const SpatialFunction& u0, const SpacePtr& space, InitialMode mode,
                            int quadrature_degree) {
  if (mode == InitialMode::nodal_interpolation) return interpolate(u0, space);
  return l2_project(u0, space, quadrature_degree);
}

DofVector backward_euler_step(const DofVector& prev, const SpacePtr& space, double tau,
                              const Vector& load, const DiffusionMatrix& diffusion,
                              SolverOptions solver) {
  const SparseOperator k = assemble_stiffness(*space, diffusion);
  return StepOperator(space, tau, k, solver).step(prev, load);
}

SpatialFunction step_source(const SpaceTimeFunction& f, RhsMode mode, double t0, double t1) {
  if (mode == RhsMode::endpoint) return [f, t1](const Point& x) { return f(x, t1); };
  const LineRule g = gauss_legendre(4, t0, t1);
  const double inv = 1.0 / (t1 - t0);
  return [f, g, inv](const Point& x) {
    double s = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] * f(x, g.nodes[q]);
    return s * inv;
  };
}

DiscreteSolution run(const Problem& problem, const SchemeConfig& config,
                     const TimePartition& partition) {
  if (!problem.source || !problem.initial) throw ConfigError("problem needs a source and initial data");
  if (!config.levels.empty() && static_cast<int>(config.levels.size()) != partition.steps() + 1)
    throw ConfigError("level schedule must have one entry per time node");
  SpaceHierarchy hierarchy(config.degree, config.diffusion, config.solver);
  DiscreteSolution sol;
  sol.partition = partition;
  sol.config = config;
  const int n_steps = partition.steps();
  sol.values.reserve(n_steps + 1);

  const int q = config.quadrature_degree;
  {
    const int level = config.level_at(0);
    const SpacePtr& space = hierarchy.space(level);
    sol.values.push_back(initial_condition(problem.initial, space, config.initial_mode, q));
    const auto f0 = [&](const Point& x) { return problem.source(x, 0.0); };
    sol.loads.push_back(assemble_load(*space, f0, q));
    sol.projected_loads.emplace_back(space, space->mass_solver().solve(sol.loads.back()));
    sol.stiffness.push_back(hierarchy.stiffness_ptr(level));
  }

  // One factorization per (level, tau) pair; uniform runs reuse a single one.
  std::map<std::pair<int, double>, std::unique_ptr<StepOperator>> ops;
  for (int n = 1; n <= n_steps; ++n) {
    const int level = config.level_at(n);
    const SpacePtr& space = hierarchy.space(level);
    const double tau = partition.tau(n);
    auto& op = ops[{level, tau}];
    if (!op) op = std::make_unique<StepOperator>(space, tau, hierarchy.stiffness(level), config.solver);
    const SpatialFunction fhat =
        step_source(problem.source, config.rhs_mode, partition.t(n - 1), partition.t(n));
    Vector load = assemble_load(*space, fhat, q);
    sol.values.push_back(op->step(sol.values.back(), load));
    sol.projected_loads.emplace_back(space, space->mass_solver().solve(load));
    sol.loads.push_back(std::move(load));
    sol.stiffness.push_back(hierarchy.stiffness_ptr(level));
  }
  return sol;
}

DofVector averaged_discrete_derivative(const DiscreteSolution& sol, int n) {
  if (n < 1 || n > sol.steps()) throw DomainError("step index out of range");
  const DofVector prev = l2_project(sol.values[n - 1], sol.space(n));
  return DofVector(sol.space(n), (sol.values[n].coefficients - prev.coefficients) / sol.partition.tau(n));
}

DofVector discrete_elliptic(const DiscreteSolution& sol, int n) {
  return discrete_elliptic_apply(sol.values[n], *sol.stiffness[n]);
}

double pointwise_residual_norm(const DiscreteSolution& sol, int n) {
  const DofVector d = averaged_discrete_derivative(sol, n);
  const DofVector a = discrete_elliptic(sol, n);
  const Vector r = d.coefficients + a.coefficients - sol.projected_loads[n].coefficients;
  return l2_norm(DofVector(sol.space(n), r));
}

std::string to_string(RhsMode mode) {
  return mode == RhsMode::endpoint ? "endpoint" : "time_average";
}

RhsMode rhs_mode_from_string(const std::string& s) {
  if (s == "endpoint") return RhsMode::endpoint;
  if (s == "time_average" || s == "average") return RhsMode::time_average;
  throw ConfigError("unknown rhs mode '" + s + "'");
}

std::string to_string(InitialMode mode) {
  return mode == InitialMode::nodal_interpolation ? "interpolation" : "projection";
}

InitialMode initial_mode_from_string(const std::string& s) {
  if (s == "interpolation" || s == "nodal_interpolation") return InitialMode::nodal_interpolation;
  if (s == "projection" || s == "l2_projection") return InitialMode::l2_projection;
  throw ConfigError("unknown initial mode '" + s + "'");
}

}  // namespace parest
