#pragma once

#include <vector>

#include "parest/timestepper.hpp"

namespace parest {

/// lambda(x) = (1 + 1/x) log(1 + x), lambda(0) = 1. Increasing on (-1, inf).
/// Throws DomainError for x <= -1 or non-finite x.
double lambda_fn(double x);

/// Logarithmic weights of the duality estimator for the horizon T = t_N.
struct DualityCoefficients {
  std::vector<double> a;  // a_0 .. a_{N-1}
  std::vector<double> b;  // b_1 .. b_N stored at indices 0 .. N-1

  double a_at(int n) const { return a[n]; }
  double b_at(int n) const { return b[n - 1]; }
};

/// Throws SizeError for N < 2.
DualityCoefficients duality_coeffs(const TimePartition& partition);

/// d^m_n = integral over I_n of exp(a (t - t_m)) dt, for 1 <= n <= m <= N.
double energy_coeff(int n, int m, double a_rate, const TimePartition& partition);

/// d_n = d^N_n for n = 1..N (index 0 holds d_1).
std::vector<double> energy_coeffs(double a_rate, const TimePartition& partition);

/// Running energy sums, updated once per time step.
///
/// After step m: e1 = sum_{n<=m} d^m_n (eta+beta+gamma+theta)_n,
/// e1_ei = sum_{n<=m} d^m_n (theta+eta)_n and e_inf = max_{n<=m} eps_n.
class EnergyAccumulator {
 public:
  EnergyAccumulator(double a_rate, double eps0);

  void update(double tau, double eps, double eta, double beta, double gamma, double theta);

  int step() const { return step_; }
  double e1() const { return e1_; }
  double e1_ei() const { return e1_ei_; }
  double e_inf() const { return e_inf_; }

 private:
  double a_;
  int step_ = 0;
  double e1_ = 0.0;
  double e1_ei_ = 0.0;
  double e_inf_ = 0.0;
};

}  // namespace parest
