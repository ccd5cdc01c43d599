#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kdiflow/dispersion.hpp"
#include "kdiflow/flow_network.hpp"

namespace kdiflow {

// Network document:
//   {"nodes": [{"id", "label", "level", "kind", "clearance", "reliability"?}],
//    "edges": [{"from", "to", "capacity", "flow"?}], "source", "sink"}
// Unknown fields are rejected with ErrorCode::SchemaError.
FlowNetwork network_from_json(const nlohmann::json& doc);
FlowNetwork parse_network(std::string_view text);
nlohmann::json network_to_json(const FlowNetwork& net);

struct Scenario {
  std::vector<Region> regions;
  std::vector<Phase> phases;
};

// Scenario document:
//   {"regions": [{"name", "population", "interests": {tag: fraction},
//                 "channels": [{"name", "influence"}], "macro_metrics_csv"?}],
//    "phases": [{"id", "channels": [name, ...]}]}
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario parse_scenario(std::string_view text);

}  // namespace kdiflow
