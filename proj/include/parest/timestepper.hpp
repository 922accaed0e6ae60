#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "parest/fespace.hpp"

namespace parest {

using SpaceTimeFunction = std::function<double(const Point&, double)>;

/// 0 = t_0 < t_1 < ... < t_N = T.
class TimePartition {
 public:
  TimePartition() = default;
  /// Throws DomainError unless strictly increasing from 0 with N >= 1.
  explicit TimePartition(std::vector<double> nodes);
  static TimePartition uniform(double final_time, int steps);

  int steps() const { return static_cast<int>(nodes_.size()) - 1; }
  double t(int n) const { return nodes_[n]; }
  /// tau_n = t_n - t_{n-1}, for 1 <= n <= N.
  double tau(int n) const { return nodes_[n] - nodes_[n - 1]; }
  double final_time() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  /// Partition of [0, t_m] made of the first m steps.
  TimePartition truncated(int m) const;

 private:
  std::vector<double> nodes_{0.0, 1.0};
};

enum class RhsMode { endpoint, time_average };
enum class InitialMode { nodal_interpolation, l2_projection };

struct SchemeConfig {
  RhsMode rhs_mode = RhsMode::time_average;
  InitialMode initial_mode = InitialMode::nodal_interpolation;
  /// Mesh level used when `levels` is empty.
  int level = 3;
  /// Optional per-node schedule of mesh levels (size N+1).
  std::vector<int> levels;
  int degree = 1;
  DiffusionMatrix diffusion;
  SolverOptions solver;
  int quadrature_degree = 8;

  int level_at(int n) const { return levels.empty() ? level : levels.at(n); }
};

struct Problem {
  SpaceTimeFunction source;
  SpatialFunction initial;
  /// Time derivative of the source, used by data-error bounds; may be empty.
  SpaceTimeFunction source_dt;
};

/// Shared meshes, spaces and operators for one nested hierarchy.
class SpaceHierarchy {
 public:
  SpaceHierarchy(int degree, DiffusionMatrix diffusion, SolverOptions solver);

  const SpacePtr& space(int level);
  const SparseOperator& stiffness(int level);
  std::shared_ptr<const SparseOperator> stiffness_ptr(int level);
  const DiffusionMatrix& diffusion() const { return diffusion_; }

 private:
  struct Entry {
    SpacePtr space;
    std::shared_ptr<const SparseOperator> stiffness;
  };
  Entry& entry(int level);

  int degree_;
  DiffusionMatrix diffusion_;
  SolverOptions solver_;
  std::map<int, Entry> entries_;
};

/// Solver for M/tau + K on one space, reused across steps of equal length.
class StepOperator {
 public:
  StepOperator(SpacePtr space, double tau, const SparseOperator& stiffness, SolverOptions solver);

  double tau() const { return tau_; }
  /// U with (U - prev, phi)/tau + a(U, phi) = load(phi).
  DofVector step(const DofVector& prev, const Vector& load) const;

 private:
  SpacePtr space_;
  double tau_;
  SparseOperator system_;
  LinearSolver solver_;
};

struct DiscreteSolution {
  TimePartition partition;
  SchemeConfig config;
  /// U^0 ... U^N.
  std::vector<DofVector> values;
  /// Load vectors <f^n, phi> (index 0 holds <f(0), phi>).
  std::vector<Vector> loads;
  /// P^n f^n as functions of the step space (index 0: P^0 f(0)).
  std::vector<DofVector> projected_loads;
  /// Stiffness operator of each step space.
  std::vector<std::shared_ptr<const SparseOperator>> stiffness;

  int steps() const { return partition.steps(); }
  const SpacePtr& space(int n) const { return values[n].space; }
};

DofVector initial_condition(const SpatialFunction& u0, const SpacePtr& space, InitialMode mode,
                            int quadrature_degree = 8);

/// Single backward Euler step with a freshly assembled system.
DofVector backward_euler_step(const DofVector& prev, const SpacePtr& space, double tau,
                              const Vector& load, const DiffusionMatrix& diffusion,
                              SolverOptions solver = {});

/// The function f^n used at step n (point value or 4-point Gauss time mean).
SpatialFunction step_source(const SpaceTimeFunction& f, RhsMode mode, double t0, double t1);

DiscreteSolution run(const Problem& problem, const SchemeConfig& config,
                     const TimePartition& partition);

/// (U^n - P_n U^{n-1}) / tau_n in the step-n space.
DofVector averaged_discrete_derivative(const DiscreteSolution& sol, int n);

/// A_n U^n = M^{-1} K U^n.
DofVector discrete_elliptic(const DiscreteSolution& sol, int n);

/// ||dbar U^n + A_n U^n - P^n f^n||, each term obtained from its own solve.
double pointwise_residual_norm(const DiscreteSolution& sol, int n);

std::string to_string(RhsMode mode);
RhsMode rhs_mode_from_string(const std::string& s);
std::string to_string(InitialMode mode);
InitialMode initial_mode_from_string(const std::string& s);

}  // namespace parest
