#pragma once

#include <string>
#include <vector>

#include "parest/accumulation.hpp"
#include "parest/indicators.hpp"

namespace parest {

/// Which combination enters the effectivity index: the reduced indicator
/// sums used in the experiments, or the complete bounds.
enum class EiMode { experiment, full_bound };

std::string to_string(EiMode mode);
EiMode ei_mode_from_string(const std::string& s);

/// Indicator history plus everything needed to evaluate the totals at any
/// reporting step m.
struct EstimatorState {
  TimePartition partition;
  EstimatorConstants constants;
  RhsMode rhs_mode = RhsMode::time_average;
  /// ||U^0 - u(0)||.
  double initial_error = 0.0;
  /// Indicators for steps 0..N (entry 0 carries eps_0 only).
  std::vector<StepIndicators> history;
  /// Energy sums after step m, m = 0..N.
  std::vector<double> energy_e1;
  std::vector<double> energy_e1_ei;
  std::vector<double> energy_inf;

  int steps() const { return static_cast<int>(history.size()) - 1; }
};

/// Runs the energy accumulator over the history.
EstimatorState make_estimator_state(const TimePartition& partition,
                                    std::vector<StepIndicators> history, double initial_error,
                                    const EstimatorConstants& constants, RhsMode rhs_mode);

/// a_n, b_n for the horizon t_m; for m = 1 these are a_0 = 0, b_1 = 1/8.
DualityCoefficients horizon_coeffs(const TimePartition& partition, int m);

/// Complete duality bound at t_m.
double duality_total(const EstimatorState& s, int m);
/// Maximum-form duality bound at t_m; ConfigError in endpoint rhs mode and
/// NaN when the time derivative of the source is unknown.
double duality_max_total(const EstimatorState& s, int m);
/// ||U^0 - u(0)|| + eps_0 + max eps_n + 2 sum d^m_n (eta+beta+gamma+theta)_n.
double energy_total(const EstimatorState& s, int m);

/// Reduced combinations used for effectivity in experiment mode.
double duality_experiment(const EstimatorState& s, int m);
double duality_max_experiment(const EstimatorState& s, int m);
double energy_experiment(const EstimatorState& s, int m);

struct EffectivityIndices {
  double duality = 0.0;
  double duality_max = 0.0;
  double energy = 0.0;
  double inv_duality = 0.0;
  double inv_duality_max = 0.0;
  double inv_energy = 0.0;
};

/// Estimator / max_{n<=m} node error and the inverses; undefined ratios
/// (zero denominator, or unavailable estimator) are NaN.
EffectivityIndices effectivity_indices(const EstimatorState& s,
                                       const std::vector<double>& node_errors, int m,
                                       EiMode mode);

}  // namespace parest
