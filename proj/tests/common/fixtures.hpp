#pragma once

#include <string>

#include "fatpipe/scenario.hpp"
#include "fatpipe/topology.hpp"

namespace fixtures {

inline std::string source_path(const std::string& rel) { return std::string(FATPIPE_SOURCE_DIR) + "/" + rel; }

inline fatpipe::ScenarioSpec four_node_spec() { return fatpipe::parse_scenario_file(source_path("scenarios/four_node.json")); }

/// Triangle A-B-C with equal link lengths.
inline fatpipe::NetworkSpec triangle(double km = 100.0, int eta = 31)
{
    fatpipe::NetworkSpec s;
    s.nodes = {"A", "B", "C"};
    s.links = {{"A", "B", km}, {"B", "C", km}, {"A", "C", km}};
    for (const auto& n : s.nodes) s.transceivers[n] = eta;
    return s;
}

}  // namespace fixtures
