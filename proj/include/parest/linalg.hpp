#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace parest {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Assembled square operator in compressed-row form.
struct SparseOperator {
  SparseMatrix matrix;
  bool symmetric = false;

  int rows() const { return static_cast<int>(matrix.rows()); }
  Vector apply(const Vector& x) const { return matrix * x; }
};

enum class SolverKind { conjugate_gradient, cholesky };

struct SolverOptions {
  SolverKind kind = SolverKind::conjugate_gradient;
  /// Relative residual target for the iterative backend.
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

/// Solver for one symmetric positive-definite operator. Factorizations and
/// preconditioners are built once and reused for every right-hand side.
class LinearSolver {
 public:
  LinearSolver(const SparseOperator& op, SolverOptions options);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws NumericError when the relative residual target is not reached.
  Vector solve(const Vector& rhs) const;

  const SolverOptions& options() const { return options_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SolverOptions options_;
};

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

}  // namespace parest
