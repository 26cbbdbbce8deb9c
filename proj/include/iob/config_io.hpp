#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "iob/core_model.hpp"

namespace iob {

// Config document parse failure; message carries the offending JSON path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a node config JSON document. Unknown keys are rejected with their
/// path; all core-model invariants are checked at parse time.
NodeConfig parse_node_config(const nlohmann::json& doc);
NodeConfig load_node_config(const std::string& path);

nlohmann::json node_config_to_json(const NodeConfig& config);

/// Built-in protocol presets: "bluetooth", "wir", "wir-future".
/// All carry plateau sensing at 0.7 nJ/bit and system efficiency 0.4.
const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);
NodeConfig preset(const std::string& name);

}  // namespace iob
