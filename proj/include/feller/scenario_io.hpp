#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "feller/feller_condition.hpp"
#include "feller/sde_simulator.hpp"

namespace feller {

inline constexpr int kSchemaVersion = 1;

/// Strict parse: unknown fields are rejected, errors carry the field path.
Scenario parse_scenario(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

SimulationConfig parse_sim_config(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimulationConfig& c);

/// Loads a scenario from a file path, or from the built-in library when the
/// argument matches a library name.
Scenario load_scenario(const std::string& path_or_name);

std::vector<std::string> library_scenario_names();
Scenario library_scenario(const std::string& name);

}  // namespace feller
