#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lcstf/errors.hpp"
#include "lcstf/madqn.hpp"

namespace lcstf {

/// Parses `key = value` lines; `#` starts a comment. Missing keys keep their
/// defaults. Throws ConfigError on unknown or duplicate keys, malformed
/// values, and configurations that fail validation.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a config file. Throws ConfigError when it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its current value and a one-line description.
std::string serialize_config(const ExperimentConfig& config);

/// All recognised keys, in serialization order.
std::vector<std::string> config_keys();

}  // namespace lcstf
