#pragma once

#include <string>

#include "hfl/orchestrator.hpp"

namespace hfl {

// Parses the key=value experiment config (see README for the key set). An
// empty file yields the defaults. Unknown keys raise ConfigError listing every
// offender; constraint violations name the field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

// Effective configuration as the same key=value form the parser accepts.
std::string config_echo(const ExperimentConfig& cfg);

}  // namespace hfl
