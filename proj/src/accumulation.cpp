#include "parest/accumulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parest/errors.hpp"

namespace parest {

double lambda_fn(double x) {
  if (!std::isfinite(x) || x <= -1.0)
    throw DomainError("lambda is defined for x > -1 only (got " + std::to_string(x) + ")");
  if (std::abs(x) < 1e-6) return 1.0 + x * (0.5 + x * (-1.0 / 6.0 + x / 12.0));
  return (1.0 + 1.0 / x) * std::log1p(x);
}

DualityCoefficients duality_coeffs(const TimePartition& p) {
  const int big_n = p.steps();
  if (big_n < 2) throw SizeError("duality coefficients need at least two time steps");
  const double t_final = p.final_time();
  DualityCoefficients c;
  c.a.resize(big_n);
  c.b.resize(big_n);
  for (int n = 1; n < big_n; ++n) {
    // log((T - t_{n-1}) / (T - t_n)) = log1p(tau_n / (T - t_n))
    c.b[n - 1] = 0.25 * std::log1p(p.tau(n) / (t_final - p.t(n)));
  }
  c.b[big_n - 1] = 0.125;

  c.a[0] = 1.0 - lambda_fn(-p.tau(1) / t_final);
  for (int n = 1; n <= big_n - 2; ++n) {
    const double rest = t_final - p.t(n);
    c.a[n] = lambda_fn(p.tau(n) / rest) - lambda_fn(-p.tau(n + 1) / rest);
  }
  c.a[big_n - 1] = lambda_fn(p.tau(big_n - 1) / p.tau(big_n)) - 1.0;
  return c;
}

double energy_coeff(int n, int m, double a_rate, const TimePartition& p) {
  if (n < 1 || n > m || m > p.steps())
    throw DomainError("energy coefficient needs 1 <= n <= m <= N");
  if (!(a_rate > 0.0)) throw DomainError("energy rate must be positive");
  return std::exp(-a_rate * (p.t(m) - p.t(n))) * (-std::expm1(-a_rate * p.tau(n))) / a_rate;
}

std::vector<double> energy_coeffs(double a_rate, const TimePartition& p) {
  std::vector<double> d(p.steps());
  for (int n = 1; n <= p.steps(); ++n) d[n - 1] = energy_coeff(n, p.steps(), a_rate, p);
  return d;
}

EnergyAccumulator::EnergyAccumulator(double a_rate, double eps0) : a_(a_rate), e_inf_(eps0) {
  if (!(a_rate > 0.0)) throw DomainError("energy rate must be positive");
}

void EnergyAccumulator::update(double tau, double eps, double eta, double beta, double gamma,
                               double theta) {
  if (!(tau > 0.0)) throw DomainError("time step must be positive");
  const double decay = std::exp(-a_ * tau);
  const double d_mm = -std::expm1(-a_ * tau) / a_;
  e1_ = e1_ * decay + d_mm * (eta + beta + gamma + theta);
  e1_ei_ = e1_ei_ * decay + d_mm * (theta + eta);
  e_inf_ = std::max(e_inf_, eps);
  ++step_;
}

}  // namespace parest
