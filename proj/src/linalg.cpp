#include "parest/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "parest/errors.hpp"

namespace parest {

using ColMatrix = Eigen::SparseMatrix<double>;

struct LinearSolver::Impl {
  ColMatrix matrix;
  Eigen::ConjugateGradient<ColMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  Eigen::SimplicialLLT<ColMatrix> llt;
};

LinearSolver::LinearSolver(const SparseOperator& op, SolverOptions options)
    : impl_(std::make_unique<Impl>()), options_(options) {
  impl_->matrix = op.matrix;
  if (options_.kind == SolverKind::cholesky) {
    impl_->llt.compute(impl_->matrix);
    if (impl_->llt.info() != Eigen::Success)
      throw NumericError("Cholesky factorization failed", 1.0);
  } else {
    impl_->cg.setTolerance(options_.tolerance);
    impl_->cg.setMaxIterations(options_.max_iterations);
    impl_->cg.compute(impl_->matrix);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Vector LinearSolver::solve(const Vector& rhs) const {
  if (rhs.size() != impl_->matrix.rows())
    throw NumericError("right-hand side has the wrong length", 1.0);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Vector::Zero(rhs.size());
  Vector x;
  if (options_.kind == SolverKind::cholesky) {
    x = impl_->llt.solve(rhs);
  } else {
    x = impl_->cg.solve(rhs);
  }
  const double residual = (rhs - impl_->matrix * x).norm() / bnorm;
  // CG stops on the preconditioned estimate; accept a small slack on the
  // true residual.
  const double target = options_.kind == SolverKind::cholesky ? 1e-10 : 10.0 * options_.tolerance;
  if (!(residual <= target)) throw NumericError("linear solve did not converge", residual);
  return x;
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::cholesky ? "cholesky" : "cg";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "cg") return SolverKind::conjugate_gradient;
  if (name == "cholesky") return SolverKind::cholesky;
  throw ConfigError("unknown solver '" + name + "' (expected cg or cholesky)");
}

}  // namespace parest
