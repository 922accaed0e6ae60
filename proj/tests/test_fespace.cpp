#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "parest/errors.hpp"
#include "parest/fespace.hpp"

using namespace parest;

namespace {

Vector random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(ReferenceElement, KroneckerAndPartitionOfUnity) {
  for (int deg = 1; deg <= 6; ++deg) {
    const ReferenceElement e(deg);
    EXPECT_EQ(e.num_nodes(), (deg + 1) * (deg + 2) / 2);
    Eigen::VectorXd v(e.num_nodes());
    for (int i = 0; i < e.num_nodes(); ++i) {
      e.values(e.nodes()[i], v);
      for (int j = 0; j < e.num_nodes(); ++j) EXPECT_NEAR(v[j], i == j ? 1.0 : 0.0, 1e-10) << deg;
    }
    const Point xi(0.21, 0.37);
    e.values(xi, v);
    EXPECT_NEAR(v.sum(), 1.0, 1e-12);
    Eigen::MatrixX2d g(e.num_nodes(), 2);
    e.gradients(xi, g);
    EXPECT_NEAR(g.col(0).sum(), 0.0, 1e-10);
    EXPECT_NEAR(g.col(1).sum(), 0.0, 1e-10);
  }
  EXPECT_THROW(ReferenceElement(0), CapabilityError);
  EXPECT_THROW(ReferenceElement(7), CapabilityError);
}

TEST(ReferenceElement, HessianOfQuadraticBasis) {
  const ReferenceElement e(2);
  // Sum of x_j^2-weighted nodal values reproduces x^2: Hessian diag(2, 0).
  Eigen::VectorXd c(e.num_nodes());
  for (int i = 0; i < e.num_nodes(); ++i) c[i] = e.nodes()[i].x() * e.nodes()[i].x();
  std::vector<Eigen::Matrix2d> h;
  e.hessians(Point(0.3, 0.3), h);
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (int i = 0; i < e.num_nodes(); ++i) s += c[i] * h[i];
  EXPECT_NEAR(s(0, 0), 2.0, 1e-10);
  EXPECT_NEAR(s(1, 1), 0.0, 1e-10);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-10);
}

TEST(Diffusion, RejectsNonSpd) {
  Eigen::Matrix2d a;
  a << 1, 0.2, 0.3, 1;
  EXPECT_THROW(DiffusionMatrix::from_matrix(a), DomainError);
  a << 1, 2, 2, 1;
  EXPECT_THROW(DiffusionMatrix::from_matrix(a), DomainError);
  a << 2, 1, 1, 2;
  const DiffusionMatrix d = DiffusionMatrix::from_matrix(a);
  EXPECT_NEAR(d.alpha, 1.0, 1e-14);
  EXPECT_NEAR(d.beta, 3.0, 1e-14);
}

TEST(FeSpace, DofCounts) {
  const SpacePtr s = make_space(uniform_square_mesh(3));
  EXPECT_EQ(s->num_dofs(), 49);
  EXPECT_TRUE(s->boundary_dofs().empty());
  const SpacePtr full = make_space(uniform_square_mesh(3), 1, false);
  EXPECT_EQ(full->num_dofs(), 81);
  EXPECT_EQ(full->boundary_dofs().size(), 32u);
  const SpacePtr p2 = make_space(uniform_square_mesh(2), 2);
  EXPECT_EQ(p2->num_dofs(), 7 * 7);
  EXPECT_THROW(DofVector(s, Vector::Zero(3)), SizeError);
}

TEST(FeSpace, MassAndStiffnessProperties) {
  const SpacePtr s = make_space(uniform_square_mesh(3), 2, false);
  const SparseOperator& m = s->mass();
  const SparseOperator k = assemble_stiffness(*s, DiffusionMatrix::identity());
  EXPECT_NEAR(Vector::Ones(s->num_dofs()).dot(m.apply(Vector::Ones(s->num_dofs()))), 4.0, 1e-12);
  EXPECT_LE(k.apply(Vector::Ones(s->num_dofs())).cwiseAbs().maxCoeff(), 1e-11);
  const Eigen::MatrixXd md(m.matrix);
  const Eigen::MatrixXd kd(k.matrix);
  EXPECT_LE((md - md.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((kd - kd.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FeSpace, AnisotropicStiffnessOfLinear) {
  // a(u, u) for u = x + 2y equals (1,2) A (1,2)^T times |Omega|.
  Eigen::Matrix2d a;
  a << 2, 0.5, 0.5, 1;
  const SpacePtr s = make_space(uniform_square_mesh(2), 1, false);
  const DofVector u = interpolate([](const Point& x) { return x.x() + 2 * x.y(); }, s);
  const SparseOperator k = assemble_stiffness(*s, DiffusionMatrix::from_matrix(a));
  const Eigen::Vector2d g(1, 2);
  EXPECT_NEAR(u.coefficients.dot(k.apply(u.coefficients)), 4.0 * g.dot(a * g), 1e-12);
}

TEST(FeSpace, ProjectionIdempotent) {
  const SpacePtr s = make_space(uniform_square_mesh(3));
  const DofVector v(s, random_vector(s->num_dofs(), 1));
  const DofVector p = l2_project(v, s);
  EXPECT_LE((p.coefficients - v.coefficients).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FeSpace, ProjectionOfConstantWithBoundaryDofs) {
  const SpacePtr s = make_space(uniform_square_mesh(2), 1, false);
  const DofVector p = l2_project([](const Point&) { return 1.0; }, s, 2);
  EXPECT_LE((p.coefficients - Vector::Ones(s->num_dofs())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FeSpace, EllipticOfZero) {
  const SpacePtr s = make_space(uniform_square_mesh(2));
  EXPECT_EQ(discrete_elliptic_apply(DofVector(s), DiffusionMatrix::identity()).coefficients.norm(), 0.0);
}

TEST(FeSpace, InterpolationReproducesSpaceFunctions) {
  const SpacePtr s = make_space(uniform_square_mesh(2), 2, false);
  const auto q = [](const Point& x) { return 1 + x.x() - 3 * x.x() * x.y() + x.y() * x.y(); };
  const DofVector u = interpolate(q, s);
  for (int k = 0; k < s->mesh().num_triangles(); k += 3) {
    const Point xi(0.2, 0.5);
    EXPECT_NEAR(u.value(k, xi), q(s->mesh().geometry(k).map(xi)), 1e-12);
  }
  const DofVector w = l2_project(q, s, 6);
  EXPECT_LE((w.coefficients - u.coefficients).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(FeSpace, GradientAndHessianOfQuadratic) {
  const SpacePtr s = make_space(uniform_square_mesh(1), 2, false);
  const DofVector u = interpolate([](const Point& x) { return x.x() * x.y() + x.y() * x.y(); }, s);
  const Point xi(0.25, 0.25);
  const Point x = s->mesh().geometry(2).map(xi);
  EXPECT_LE((u.gradient(2, xi) - Point(x.y(), x.x() + 2 * x.y())).norm(), 1e-12);
  Eigen::Matrix2d h;
  h << 0, 1, 1, 2;
  EXPECT_LE((u.hessian(2, xi) - h).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(FeSpace, CrossMeshPairingAndDistance) {
  const SpacePtr coarse = make_space(uniform_square_mesh(2));
  const SpacePtr fine = make_space(uniform_square_mesh(4));
  const DofVector vc(coarse, random_vector(coarse->num_dofs(), 2));
  // Prolongation is exact: the coarse function lives in the fine space.
  const DofVector vf = l2_project(vc, fine);
  EXPECT_LE(l2_distance(vc, vf), 1e-12);
  EXPECT_NEAR(l2_norm(vf), l2_norm(vc), 1e-12);
  // Restriction is the orthogonal projection.
  const DofVector wf(fine, random_vector(fine->num_dofs(), 3));
  const DofVector wc = l2_project(wf, coarse);
  const Vector pairing = mass_pairing(wf, *coarse);
  EXPECT_LE((coarse->mass().apply(wc.coefficients) - pairing).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(l2_norm(wc), l2_norm(wf) + 1e-12);
  const double d = l2_distance(wf, wc);
  EXPECT_NEAR(d * d, l2_norm(wf) * l2_norm(wf) - l2_norm(wc) * l2_norm(wc), 1e-10);
}

TEST(FeSpace, CommonPointsCoverDomain) {
  double area = 0.0;
  int count = 0;
  for_each_common_point(uniform_square_mesh(1), uniform_square_mesh(3), 2, [&](const CommonPoint& p) {
    area += p.weight;
    ++count;
  });
  EXPECT_NEAR(area, 4.0, 1e-13);
  EXPECT_EQ(count, 128 * 3);
}

TEST(FeSpace, CholeskyAndCgAgree) {
  SolverOptions chol;
  chol.kind = SolverKind::cholesky;
  const SpacePtr a = make_space(uniform_square_mesh(3));
  const SpacePtr b = make_space(uniform_square_mesh(3), 1, true, chol);
  const auto f = [](const Point& x) { return std::sin(x.x()) * x.y(); };
  const DofVector pa = l2_project(f, a, 6);
  const DofVector pb = l2_project(f, b, 6);
  EXPECT_LE((pa.coefficients - pb.coefficients).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LinearSolver, ReportsNonConvergence) {
  const SpacePtr s = make_space(uniform_square_mesh(4));
  SolverOptions o;
  o.max_iterations = 2;
  const LinearSolver solver(assemble_stiffness(*s, DiffusionMatrix::identity()), o);
  try {
    solver.solve(Vector::Ones(s->num_dofs()));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_GT(e.residual(), o.tolerance);
  }
  EXPECT_EQ(solver_kind_from_string("cg"), SolverKind::conjugate_gradient);
  EXPECT_EQ(solver_kind_from_string(to_string(SolverKind::cholesky)), SolverKind::cholesky);
  EXPECT_THROW(solver_kind_from_string("lu"), ConfigError);
}
