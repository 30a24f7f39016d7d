#pragma once

#include <string>
#include <vector>

#include "spherelab/harness.hpp"

namespace spherelab {

// Canonical config key order, used everywhere a config is listed or echoed.
const std::vector<std::string>& config_keys();

bool is_config_key(const std::string& key);

// Sets one field from its textual form; throws ConfigInvalid naming the
// key for unknown keys or unparseable values.
void apply_config_override(ExperimentConfig& config, const std::string& key,
                           const std::string& value);

// The field's value as a JSON token: numbers bare, flags true/false, the
// method name quoted. Round-trips exactly through apply_config_override.
std::string config_field_json(const ExperimentConfig& config, const std::string& key);

// Flat key = value text, one pair per line, # starts a comment. Unknown
// keys are a hard error. Values not present keep their defaults.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace spherelab
