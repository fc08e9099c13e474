#pragma once

// Scenario and gain-list files (TOML). Every key carries its unit in its
// name; unknown keys are rejected with their dotted path.

#include <filesystem>
#include <string_view>
#include <vector>

#include "teleop/drift.hpp"
#include "teleop/simrunner.hpp"

namespace teleop {

// Throw ConfigError on syntax errors, unknown keys, or invalid values.
ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

// A list of [[gains]] tables with k_r, k_t (scalar or 3-vector) and an
// optional allow_divergent flag. An empty list is an error.
std::vector<CompGains> parse_gains(std::string_view text, std::string_view source = "<string>");
std::vector<CompGains> load_gains(const std::filesystem::path& path);

}  // namespace teleop
