#include "parest/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "parest/errors.hpp"
#include "parest/quadrature.hpp"

namespace parest {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError("invalid value '" + value + "' for key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad(key, value, "expected a number");
  }
  if (pos != value.size() || !std::isfinite(v)) bad(key, value, "expected a finite number");
  return v;
}

double to_positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0)) bad(key, value, "must be positive");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad(key, value, "expected an integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad(key, value, "expected true or false");
}

template <class Fn>
auto translate(const std::string& key, const std::string& value, Fn&& fn) {
  try {
    return fn(value);
  } catch (const ConfigError&) {
    bad(key, value, "unrecognized choice");
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "kappa", "T", "levels", "c_tau", "rhs_mode", "initial_mode", "degree", "C62", "C102",
      "C142", "C_PF", "alpha", "half_factor_theta", "pf_factor_theta", "restrict_static_mesh_change",
      "quadrature_degree", "data_level", "data_degree", "solver", "solver_tolerance", "ei_mode",
      "output_dir"};
  return keys;
}

std::vector<int> parse_levels(const std::string& text) {
  const std::string s = trim(text);
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int("levels", trim(s.substr(0, dots)));
    const int hi = to_int("levels", trim(s.substr(dots + 2)));
    if (hi < lo) bad("levels", text, "empty range");
    for (int l = lo; l <= hi; ++l) out.push_back(l);
    return out;
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    out.push_back(to_int("levels", item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  StudyConfig& s = c.study;
  EstimatorConstants& k = s.indicators.constants;
  if (key == "kappa") {
    const int v = to_int(key, value);
    if (v < 1) bad(key, value, "must be a positive integer");
    s.problem.kappa = v;
  } else if (key == "T") {
    s.problem.final_time = to_positive(key, value);
  } else if (key == "levels") {
    s.levels = parse_levels(value);
  } else if (key == "c_tau") {
    s.c_tau = to_positive(key, value);
  } else if (key == "rhs_mode") {
    s.scheme.rhs_mode = translate(key, value, rhs_mode_from_string);
  } else if (key == "initial_mode") {
    s.scheme.initial_mode = translate(key, value, initial_mode_from_string);
  } else if (key == "degree") {
    const int v = to_int(key, value);
    if (v < 1 || v > 6) bad(key, value, "supported degrees are 1..6");
    s.scheme.degree = v;
  } else if (key == "C62") {
    k.c62 = to_positive(key, value);
  } else if (key == "C102") {
    k.c102 = to_positive(key, value);
  } else if (key == "C142") {
    k.c142 = to_positive(key, value);
  } else if (key == "C_PF") {
    k.c_pf = to_positive(key, value);
  } else if (key == "alpha") {
    k.alpha = to_positive(key, value);
  } else if (key == "half_factor_theta") {
    k.half_factor_theta = to_bool(key, value);
  } else if (key == "pf_factor_theta") {
    k.pf_factor_theta = to_bool(key, value);
  } else if (key == "restrict_static_mesh_change") {
    s.indicators.restrict_static_mesh_change = to_bool(key, value);
  } else if (key == "quadrature_degree") {
    const int v = to_int(key, value);
    if (v < 0 || v > kMaxTriangleRuleDegree) bad(key, value, "must lie in 0..40");
    s.scheme.quadrature_degree = v;
    s.indicators.quadrature_degree = v;
  } else if (key == "data_level") {
    const int v = to_int(key, value);
    if (v < 0 || v > kMaxMeshLevel) bad(key, value, "must lie in 0..12");
    s.indicators.data_level = v;
  } else if (key == "data_degree") {
    const int v = to_int(key, value);
    if (v < 0 || v > kMaxTriangleRuleDegree) bad(key, value, "must lie in 0..40");
    s.indicators.data_degree = v;
  } else if (key == "solver") {
    s.scheme.solver.kind = translate(key, value, solver_kind_from_string);
  } else if (key == "solver_tolerance") {
    const double v = to_positive(key, value);
    if (v >= 1.0) bad(key, value, "must be below 1");
    s.scheme.solver.tolerance = v;
  } else if (key == "ei_mode") {
    if (value == "both")
      s.ei_modes = {EiMode::experiment, EiMode::full_bound};
    else
      s.ei_modes = {translate(key, value, ei_mode_from_string)};
  } else if (key == "output_dir") {
    if (value.empty()) bad(key, value, "must not be empty");
    c.output_dir = value;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::vector<Setting> read_settings(std::istream& in) {
  std::vector<Setting> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void validate(const RunConfig& c) {
  const StudyConfig& s = c.study;
  if (s.levels.empty()) throw ConfigError("invalid value for key 'levels': no levels given");
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    if (s.levels[i] < 0 || s.levels[i] > kMaxMeshLevel)
      throw ConfigError("invalid value for key 'levels': levels must lie in 0..12");
    if (i > 0 && s.levels[i] <= s.levels[i - 1])
      throw ConfigError("invalid value for key 'levels': levels must be strictly increasing");
  }
  if (s.scheme.quadrature_degree < 2 * s.scheme.degree)
    throw ConfigError("invalid value for key 'quadrature_degree': must be at least twice the degree");
  s.indicators.constants.validate();
}

RunConfig parse_config(const std::vector<Setting>& file_settings,
                       const std::vector<Setting>& overrides) {
  RunConfig c;
  for (const auto& [k, v] : file_settings) apply_setting(c, k, v);
  for (const auto& [k, v] : overrides) apply_setting(c, k, v);
  validate(c);
  return c;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::vector<Setting>& overrides) {
  std::vector<Setting> settings;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read configuration file " + file->string());
    settings = read_settings(in);
  }
  return parse_config(settings, overrides);
}

void write_config(std::ostream& out, const RunConfig& c) {
  const StudyConfig& s = c.study;
  const EstimatorConstants& k = s.indicators.constants;
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "kappa = " << s.problem.kappa << '\n';
  out << "T = " << format_value(s.problem.final_time) << '\n';
  out << "levels = ";
  for (std::size_t i = 0; i < s.levels.size(); ++i) out << (i ? "," : "") << s.levels[i];
  out << '\n';
  out << "c_tau = " << format_value(s.c_tau) << '\n';
  out << "rhs_mode = " << to_string(s.scheme.rhs_mode) << '\n';
  out << "initial_mode = " << to_string(s.scheme.initial_mode) << '\n';
  out << "degree = " << s.scheme.degree << '\n';
  out << "C62 = " << format_value(k.c62) << '\n';
  out << "C102 = " << format_value(k.c102) << '\n';
  out << "C142 = " << format_value(k.c142) << '\n';
  out << "C_PF = " << format_value(k.c_pf) << '\n';
  out << "alpha = " << format_value(k.alpha) << '\n';
  out << "half_factor_theta = " << b(k.half_factor_theta) << '\n';
  out << "pf_factor_theta = " << b(k.pf_factor_theta) << '\n';
  out << "restrict_static_mesh_change = " << b(s.indicators.restrict_static_mesh_change) << '\n';
  out << "quadrature_degree = " << s.scheme.quadrature_degree << '\n';
  out << "data_level = " << s.indicators.data_level << '\n';
  out << "data_degree = " << s.indicators.data_degree << '\n';
  out << "solver = " << to_string(s.scheme.solver.kind) << '\n';
  out << "solver_tolerance = " << format_value(s.scheme.solver.tolerance) << '\n';
  out << "ei_mode = " << (s.ei_modes.size() == 2 ? "both" : to_string(s.ei_modes.front())) << '\n';
  out << "output_dir = " << c.output_dir.string() << '\n';
}

}  // namespace parest
