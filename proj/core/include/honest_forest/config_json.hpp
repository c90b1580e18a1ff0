#pragma once

#include <string>

#include "honest_forest/experiments.hpp"

namespace honest_forest {

// Parses the experiment configuration schema. Field errors throw
// ConfigError with the dotted path of the offending field; syntax errors
// use the pseudo-field "config".
ExperimentConfig config_from_json(const std::string& text);

// Serializes a configuration back to JSON (sorted keys, no whitespace).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace honest_forest
