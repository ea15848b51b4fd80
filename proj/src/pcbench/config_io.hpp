#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pcbench/env.hpp"
#include "pcbench/oracle.hpp"

namespace pcbench {

/// A scenario file: environment plus the oracle and evaluation settings that go with it.
struct Scenario {
  EnvConfig env;
  OracleSettings oracle;
  double gamma = 1.0;
  std::string description;
  std::string path;  // empty when built from memory
};

/// Key order matters (setpoint and disturbance declaration order), hence ordered_json.
using ScenarioJson = nlohmann::ordered_json;

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const ScenarioJson& doc, const std::string& origin = "<memory>");
Scenario scenario_from_text(const std::string& text, const std::string& origin = "<memory>");

/// Short machine-readable description used by `list` and the C API.
nlohmann::json scenario_summary(const Scenario& s);

/// Parameter file for one model: {"model", "version", "time_unit", "parameters": {k: {value, unit, description}}, ...}.
ParameterMap load_model_parameters(const std::string& path, std::string* model_name = nullptr);

/// Directory of bundled data: $PCBENCH_DATA_DIR if set, else the build-time location.
std::string data_dir();

/// Sorted *.json files in a directory; a missing directory yields an empty list.
std::vector<std::string> list_scenario_files(const std::string& dir);

}  // namespace pcbench
