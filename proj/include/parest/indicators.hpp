#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "parest/quadrature.hpp"
#include "parest/timestepper.hpp"

namespace parest {

struct EstimatorConstants {
  double c62 = 1.0;
  double c102 = 1.0;
  double c142 = 1.0;
  /// Poincare-Friedrichs constant of [-1,1]^2: 1/sqrt(pi^2/2).
  double c_pf = std::numbers::sqrt2 / std::numbers::pi;
  double alpha = 1.0;
  /// Apply the 1/2 in front of the time indicator.
  bool half_factor_theta = true;
  /// Multiply theta by c_pf inside the full-bound duality totals.
  bool pf_factor_theta = true;

  /// Energy decay rate alpha / c_pf^2.
  double a_rate() const { return alpha / (c_pf * c_pf); }
  /// Throws ConfigError unless every constant is positive and finite.
  void validate() const;
};

struct IndicatorOptions {
  EstimatorConstants constants;
  /// On unchanged meshes keep only the (P_n - Id) U^{n-1}/tau_n part of the
  /// mesh-change function, which then vanishes.
  bool restrict_static_mesh_change = true;
  /// Spatial rule for data terms; independent of the finite element mesh.
  int data_level = 4;
  int data_degree = 8;
  /// Spatial rule for the mesh-change function.
  int quadrature_degree = 8;
};

/// Inner and jump residuals of one discrete solution value.
///
/// inner = div_el(A grad U) - A_n U per triangle, jump = sum over the two
/// neighbours of A grad U . n_out on interior edges. Then
/// (inner, phi) + (jump, phi)_Sigma = 0 for every phi of the space.
struct ResidualData {
  DofVector solution;
  DofVector elliptic;
  DiffusionMatrix diffusion;
  /// Constant jump per mesh edge for P1 (zero on boundary edges); empty
  /// for higher degree, where jump_at evaluates on the fly.
  std::vector<double> edge_jump;

  const TriangleMesh& mesh() const { return solution.space->mesh(); }
  double inner(int k, const Point& xi) const;
  double jump_at(int e, const Point& x) const;
};

ResidualData compute_residuals(const DofVector& u, const DofVector& elliptic,
                               const DiffusionMatrix& diffusion);
ResidualData compute_residuals(const DiscreteSolution& sol, int n);

/// C62 ||h^2 R|| + C102 ||h^{3/2} J||_Sigma.
double epsilon_n(const ResidualData& res, const EstimatorConstants& c);

/// Space indicator from the backward differences of residuals n-1 and n.
double eta_n(const ResidualData& current, const ResidualData& previous, double tau,
             const EstimatorConstants& c);
double eta_n(const DiscreteSolution& sol, int n, const EstimatorConstants& c);

/// D^n = P^n f^n - dbar U^n (n >= 1) and D^0 = A^0 U^0.
DofVector time_indicator_data(const DiscreteSolution& sol, int n);
/// factor * ||D^{n-1} - D^n||, factor 1/2 when half_factor_theta.
double theta_n(const DiscreteSolution& sol, int n, const EstimatorConstants& c);
/// factor * ||A_{n-1} U^{n-1} - A_n U^n||, from two elliptic solves.
double theta_direct_n(const DiscreteSolution& sol, int n, const EstimatorConstants& c);
/// ||U^{n-1} - U^n|| + eta.
double theta_alt_n(const DiscreteSolution& sol, int n, double eta);

/// Data indicator: integral over I_n of ||f^n - f(t)|| (5-point Gauss in time).
double gamma_n(const SpaceTimeFunction& f, const QuadratureCloud& cloud, double t0, double t1,
               RhsMode mode);
/// Integral over I_n of ||d_t f(t)||.
double source_dt_l1(const SpaceTimeFunction& f_dt, const QuadratureCloud& cloud, double t0,
                    double t1);

/// Global data indicator at step m = gammas.size(). gammas holds
/// gamma_1..gamma_m and b holds b_1..b_{m-1} (or more) for the horizon t_m.
double beta_tilde(const std::vector<double>& gammas, const std::vector<double>& b, RhsMode mode);

struct MeshChange {
  double h2 = 0.0;  // ||g h_n^2||
  double h1 = 0.0;  // ||g h_n||
  double l2 = 0.0;  // ||g||
};

/// Norms of g = (P_n - Id)(U^{n-1}/tau_n + f^n) on the common refinement.
MeshChange mesh_change_indicator(const DiscreteSolution& sol, int n, const SpaceTimeFunction& f,
                                 const IndicatorOptions& opts);

struct StepIndicators {
  double eps = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double theta_alt = 0.0;
  double gamma = 0.0;
  double mc_h2 = 0.0;
  double mc_h1 = 0.0;
  double beta = 0.0;
  /// Integral over I_n of ||d_t f||; NaN when d_t f is unknown.
  double source_dt = 0.0;
};

/// Every indicator for steps 0..N, computed in one sequential sweep.
std::vector<StepIndicators> compute_indicator_history(const DiscreteSolution& sol,
                                                      const Problem& problem,
                                                      const IndicatorOptions& opts);

}  // namespace parest
