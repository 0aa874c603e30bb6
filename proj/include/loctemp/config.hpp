#pragma once

#include <map>
#include <string>
#include <vector>

#include "loctemp/scenarios.hpp"

namespace loctemp {

// Thrown for malformed documents or invalid values; the message carries the
// line number or the section.key path of the offending entry.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedConfig {
  // scenario id -> fully resolved configuration, in registry order
  std::vector<ScenarioConfig> scenarios;
};

// Parses the key-value document (sections: geometry, grid, field, states,
// checks, output; scenario-scoped overrides as [<scenario>.<section>]),
// applies per-scenario defaults, and validates every field. Unknown sections
// or keys are rejected with their line number.
ParsedConfig parse_config(const std::string& text);

// The shipped defaults: every registered scenario at desk-scale sizes.
ParsedConfig default_config();

// Reads the file at `path`, or returns default_config() for the literal
// name "default".
ParsedConfig load_config(const std::string& path);

// Schema help text printed on usage errors.
std::string config_schema_help();

}  // namespace loctemp
