#pragma once

#include <string>
#include <vector>

#include "rsim/engine.hpp"

namespace rsim {

/// Contents of a flat key = value config file. Sweep keys (axis, values,
/// seeds, strategies) are optional; `seeds` also sets the seed of single runs.
struct ConfigFile {
  ExperimentConfig config;
  SweepSpec sweep;
  bool has_axis = false;
  bool has_values = false;
};

/// Applies one setting; throws std::invalid_argument on an unknown key or a
/// malformed value.
void apply_setting(ConfigFile& file, const std::string& key, const std::string& value);

/// Parses config text: one `key = value` per line, `#` starts a comment.
ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

/// Applies `key=value` overrides in order (the last occurrence wins).
void apply_overrides(ConfigFile& file, const std::vector<std::string>& overrides);

/// Every recognized key, in file order.
const std::vector<std::string>& config_keys();

}  // namespace rsim
