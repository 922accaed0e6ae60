// Command-line driver: benchmark studies, self-test, coefficient tables.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parest/config.hpp"
#include "parest/errors.hpp"
#include "parest/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitSelftest = 3;

int run_command(const std::optional<std::string>& config_file,
                const std::vector<parest::Setting>& overrides, bool quiet) {
  std::optional<std::filesystem::path> file;
  if (config_file) file = *config_file;
  const parest::RunConfig cfg = parest::parse_config(file, overrides);
  const parest::ConvergenceStudy study = parest::run_study(cfg.study);
  parest::write_study(study, cfg.output_dir);
  if (!quiet) {
    parest::write_summary_csv(std::cout, study);
    std::cout << "wrote " << cfg.output_dir.string() << '\n';
  }
  return kExitOk;
}

int coeffs_command(double tau, double final_time, double a_rate) {
  if (!(tau > 0.0) || !(final_time > 0.0) || !(a_rate > 0.0))
    throw parest::ConfigError("tau, T and the energy rate must be positive");
  const int steps = static_cast<int>(std::llround(final_time / tau));
  if (steps < 2 || std::abs(steps * tau - final_time) > 1e-9 * final_time)
    throw parest::ConfigError("T must be a multiple (at least 2) of tau");
  const parest::TimePartition p = parest::TimePartition::uniform(final_time, steps);
  const parest::DualityCoefficients dc = parest::duality_coeffs(p);
  const std::vector<double> d = parest::energy_coeffs(a_rate, p);
  using parest::format_value;
  std::cout << "n,t_n,a_n_minus_1,b_n,d_n\n";
  double sa = 0.0;
  double sb = 0.0;
  for (int n = 1; n <= steps; ++n) {
    sa += dc.a_at(n - 1);
    sb += dc.b_at(n);
    std::cout << n << ',' << format_value(p.t(n)) << ',' << format_value(dc.a_at(n - 1)) << ','
              << format_value(dc.b_at(n)) << ',' << format_value(d[n - 1]) << '\n';
  }
  const double lg = std::log(final_time / p.tau(steps));
  std::cout << "# sum_a = " << format_value(sa) << '\n';
  std::cout << "# log(T/tau_N) = " << format_value(lg) << '\n';
  std::cout << "# sum_b = " << format_value(sb) << '\n';
  std::cout << "# (1/2 + log(T/tau_N))/4 = " << format_value(0.25 * (0.5 + lg)) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward Euler heat solver with duality and energy a posteriori estimators"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the benchmark convergence study and write CSV files");
  std::optional<std::string> config_file;
  run->add_option("-c,--config", config_file, "Configuration file of 'key = value' lines");
  std::vector<std::string> sets;
  run->add_option("--set", sets, "Override one setting, key=value (repeatable)");
  std::map<std::string, std::string> flag_values;
  for (const std::string& key : parest::config_keys())
    run->add_option("--" + key, flag_values[key], "Override '" + key + "'");
  bool quiet = false;
  run->add_flag("-q,--quiet", quiet, "Do not print the summary table");
  auto* print_config = run->add_flag("--print-config", "Print the effective configuration and exit");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  auto* coeffs = app.add_subcommand("coeffs", "Print a_n, b_n, d_n for a uniform partition");
  double tau = 0.25;
  double final_time = 10.0;
  double c_pf = std::numbers::sqrt2 / std::numbers::pi;
  double alpha = 1.0;
  coeffs->add_option("--tau", tau, "Uniform time step")->capture_default_str();
  coeffs->add_option("--T", final_time, "Final time")->capture_default_str();
  coeffs->add_option("--C_PF", c_pf, "Poincare-Friedrichs constant")->capture_default_str();
  coeffs->add_option("--alpha", alpha, "Coercivity constant")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      std::vector<parest::Setting> overrides;
      for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw parest::ConfigError("--set expects key=value, got '" + s + "'");
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
      }
      // Named flags are applied in key order after --set.
      for (const std::string& key : parest::config_keys())
        if (run->count("--" + key) > 0) overrides.emplace_back(key, flag_values[key]);
      if (*print_config) {
        std::optional<std::filesystem::path> file;
        if (config_file) file = *config_file;
        parest::write_config(std::cout, parest::parse_config(file, overrides));
        return kExitOk;
      }
      return run_command(config_file, overrides, quiet);
    }
    if (*selftest) return parest::run_selftest(std::cout).ok() ? kExitOk : kExitSelftest;
    if (*coeffs) return coeffs_command(tau, final_time, alpha / (c_pf * c_pf));
  } catch (const parest::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const parest::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
