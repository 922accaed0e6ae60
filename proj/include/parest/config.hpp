#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parest/bench.hpp"

namespace parest {

struct RunConfig {
  StudyConfig study;
  std::filesystem::path output_dir = "results";
};

using Setting = std::pair<std::string, std::string>;

/// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

/// Apply one `key = value` setting. ConfigError naming the key for unknown
/// keys and malformed or out-of-range values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Lines of `key = value`; `#` starts a comment; blank lines are ignored.
std::vector<Setting> read_settings(std::istream& in);

/// Defaults, then file settings, then overrides (flags win).
RunConfig parse_config(const std::vector<Setting>& file_settings,
                       const std::vector<Setting>& overrides);
RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::vector<Setting>& overrides);

/// Cross-field checks; ConfigError on failure.
void validate(const RunConfig& config);

/// "2..5" or "2,3,5".
std::vector<int> parse_levels(const std::string& text);

/// Current value of every key, one `key = value` line each.
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace parest
