#include "parest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parest/errors.hpp"

namespace parest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_step(const EstimatorState& s, int m) {
  if (m < 1 || m > s.steps()) throw DomainError("reporting step out of range");
}

double max_eps(const EstimatorState& s, int first, int last) {
  double v = 0.0;
  for (int n = first; n <= last; ++n) v = std::max(v, s.history[n].eps);
  return v;
}

double ratio(double num, double den) {
  if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) return kNaN;
  return num / den;
}

}  // namespace

std::string to_string(EiMode mode) {
  return mode == EiMode::experiment ? "experiment" : "full_bound";
}

EiMode ei_mode_from_string(const std::string& s) {
  if (s == "experiment") return EiMode::experiment;
  if (s == "full_bound" || s == "full") return EiMode::full_bound;
  throw ConfigError("unknown EI mode '" + s + "'");
}

EstimatorState make_estimator_state(const TimePartition& partition,
                                    std::vector<StepIndicators> history, double initial_error,
                                    const EstimatorConstants& constants, RhsMode rhs_mode) {
  if (static_cast<int>(history.size()) != partition.steps() + 1)
    throw SizeError("indicator history does not match the time partition");
  constants.validate();
  EstimatorState s;
  s.partition = partition;
  s.constants = constants;
  s.rhs_mode = rhs_mode;
  s.initial_error = initial_error;
  s.history = std::move(history);
  EnergyAccumulator acc(constants.a_rate(), s.history[0].eps);
  s.energy_e1 = {0.0};
  s.energy_e1_ei = {0.0};
  s.energy_inf = {acc.e_inf()};
  for (int n = 1; n <= s.steps(); ++n) {
    const StepIndicators& h = s.history[n];
    acc.update(partition.tau(n), h.eps, h.eta, h.beta, h.gamma, h.theta);
    s.energy_e1.push_back(acc.e1());
    s.energy_e1_ei.push_back(acc.e1_ei());
    s.energy_inf.push_back(acc.e_inf());
  }
  return s;
}

DualityCoefficients horizon_coeffs(const TimePartition& partition, int m) {
  if (m < 1 || m > partition.steps()) throw DomainError("horizon step out of range");
  if (m == 1) return {{0.0}, {0.125}};
  return duality_coeffs(partition.truncated(m));
}

double duality_total(const EstimatorState& s, int m) {
  check_step(s, m);
  const DualityCoefficients c = horizon_coeffs(s.partition, m);
  const double pf = s.constants.pf_factor_theta ? s.constants.c_pf : 1.0;
  double sum_eps = 0.0;
  for (int n = 0; n < m; ++n) sum_eps += c.a_at(n) * s.history[n].eps * s.history[n].eps;
  double sum_theta = 0.0;
  for (int n = 1; n <= m; ++n) {
    const double th = pf * s.history[n].theta;
    sum_theta += c.b_at(n) * th * th;
  }
  double sum_mc = 0.0;
  for (int n = 1; n < m; ++n) sum_mc += c.b_at(n) * s.history[n].mc_h2 * s.history[n].mc_h2;
  std::vector<double> gammas;
  std::vector<double> bs;
  for (int n = 1; n <= m; ++n) {
    gammas.push_back(s.history[n].gamma);
    bs.push_back(c.b_at(n));
  }
  return s.initial_error + std::sqrt(sum_eps) + s.history[m].eta + std::sqrt(sum_theta) +
         std::sqrt(0.5 * s.partition.tau(m)) * s.history[m].mc_h1 + std::sqrt(sum_mc) +
         beta_tilde(gammas, bs, s.rhs_mode);
}

double duality_max_total(const EstimatorState& s, int m) {
  check_step(s, m);
  if (s.rhs_mode != RhsMode::time_average)
    throw ConfigError("the maximum-form duality bound needs time-averaged source data");
  const double pf = s.constants.pf_factor_theta ? s.constants.c_pf : 1.0;
  double data = 0.0;
  double max_mc = 0.0;
  double max_theta = 0.0;
  for (int n = 1; n <= m; ++n) {
    const StepIndicators& h = s.history[n];
    data += s.partition.tau(n) * h.source_dt;
    max_mc = std::max(max_mc, h.mc_h2);
    max_theta = std::max(max_theta, h.theta);
  }
  if (!std::isfinite(data)) return kNaN;
  const double weight = std::sqrt(1.0 + std::log(s.partition.t(m) / s.partition.tau(m)));
  return s.initial_error + std::sqrt(0.5 * s.partition.tau(m)) * s.history[m].mc_h1 + data +
         weight * (max_eps(s, 0, m) + 2.0 * max_mc + 0.5 * pf * max_theta);
}

double energy_total(const EstimatorState& s, int m) {
  check_step(s, m);
  return s.initial_error + s.history[0].eps + s.energy_inf[m] + 2.0 * s.energy_e1[m];
}

double duality_experiment(const EstimatorState& s, int m) {
  check_step(s, m);
  const DualityCoefficients c = horizon_coeffs(s.partition, m);
  double sum_theta = 0.0;
  for (int n = 1; n <= m; ++n) sum_theta += c.b_at(n) * s.history[n].theta * s.history[n].theta;
  double sum_eps = 0.0;
  for (int n = 0; n < m; ++n) sum_eps += c.a_at(n) * s.history[n].eps * s.history[n].eps;
  return std::sqrt(sum_theta) + std::sqrt(sum_eps) + s.history[m].eta;
}

double duality_max_experiment(const EstimatorState& s, int m) {
  check_step(s, m);
  double max_theta = 0.0;
  for (int n = 1; n <= m; ++n) max_theta = std::max(max_theta, s.history[n].theta);
  return max_theta + max_eps(s, 0, m - 1) + s.history[m].eta;
}

double energy_experiment(const EstimatorState& s, int m) {
  check_step(s, m);
  return s.energy_e1_ei[m] + s.energy_inf[m];
}

EffectivityIndices effectivity_indices(const EstimatorState& s,
                                       const std::vector<double>& node_errors, int m,
                                       EiMode mode) {
  check_step(s, m);
  if (static_cast<int>(node_errors.size()) <= m) throw SizeError("error history too short");
  double err = 0.0;
  for (int n = 0; n <= m; ++n) err = std::max(err, node_errors[n]);
  double dual = 0.0;
  double dmax = 0.0;
  double energy = 0.0;
  if (mode == EiMode::experiment) {
    dual = duality_experiment(s, m);
    dmax = duality_max_experiment(s, m);
    energy = energy_experiment(s, m);
  } else {
    dual = duality_total(s, m);
    dmax = s.rhs_mode == RhsMode::time_average ? duality_max_total(s, m) : kNaN;
    energy = energy_total(s, m);
  }
  EffectivityIndices ei;
  ei.duality = ratio(dual, err);
  ei.duality_max = ratio(dmax, err);
  ei.energy = ratio(energy, err);
  ei.inv_duality = std::isfinite(ei.duality) ? ratio(err, dual) : kNaN;
  ei.inv_duality_max = std::isfinite(ei.duality_max) ? ratio(err, dmax) : kNaN;
  ei.inv_energy = std::isfinite(ei.energy) ? ratio(err, energy) : kNaN;
  return ei;
}

}  // namespace parest
