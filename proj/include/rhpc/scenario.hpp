#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rhpc/simulator.hpp"

namespace rhpc {

/// Built-in presets as (name, YAML text), compiled in from presets/*.yaml.
const std::vector<std::pair<std::string, std::string>> &preset_sources();

/// Parses a scenario document. A top-level `preset: <name>` key is resolved
/// first and the document is deep-merged over it (maps merge key by key,
/// everything else replaces). Unknown keys and malformed YAML throw
/// ValidationError whose message carries line and column. Relative file
/// paths inside the document are resolved against `base_dir`.
ScenarioConfig parse_scenario(const std::string &text, const std::string &base_dir = ".");

/// `source` is a file path or, when no such file exists, a preset name.
/// The result has passed validate_scenario; warnings are appended to
/// `warnings` when given.
ScenarioConfig load_scenario(const std::string &source,
                             std::vector<std::string> *warnings = nullptr);

/// Fully resolved scenario document; parse_scenario(to_yaml(c)) == c.
std::string to_yaml(const ScenarioConfig &cfg);

} // namespace rhpc
