#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fatpipe/controller.hpp"
#include "fatpipe/flowsim.hpp"
#include "fatpipe/topology.hpp"
#include "fatpipe/traffic.hpp"

namespace fatpipe {

inline constexpr int kScenarioSchemaVersion = 1;

struct DemandSpec {
    std::string source;
    std::string target;
    double h_avg = 0.0;
};

/// Everything needed to reproduce one experiment.
struct ScenarioSpec {
    int schema_version = kScenarioSchemaVersion;
    std::string name;

    NetworkSpec network;

    TrafficParams traffic;
    std::uint64_t seed = 0;
    /// Empty means every ordered node pair with h_avg = mu_b.
    std::vector<DemandSpec> demands;

    FlowParams flow;
    double duration_s = 5.0;
    std::size_t trace_every = 100;
    KernelMode kernel = KernelMode::automatic;

    ControllerTimings timings;
    ControlMode mode = ControlMode::reoccupation;
    double pi = 1.1;
    AllocationBasis allocation_basis = AllocationBasis::configured;
    QueueNormalization normalization = QueueNormalization::per_circuit;
    bool sticky = false;

    SolverBackend backend = SolverBackend::exact;
    AnnealConfig anneal;
    std::size_t node_budget = 10'000'000;

    std::size_t k_routes = 3;
    std::size_t max_bypass_hops = 2;
    double optical_reach_km = 3000.0;
};

/// Parses and validates a JSON scenario. Every problem is collected and thrown
/// together as a ValidationError; each message starts with its JSON location.
ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec parse_scenario_file(const std::string& path);

std::string to_json(const ScenarioSpec& spec);

/// Static objects derived from a scenario.
struct ScenarioModel {
    NetworkTopology topology;
    ConfigurationCatalog catalog;
    std::vector<std::string> demand_labels;
    std::vector<std::string> circuit_labels;
    std::vector<std::string> config_labels;  // e.g. "[N2,N3,N1]" or "[N2,N3],[N3,N1]"
    std::vector<int> eta;                    // per node
};

ScenarioModel build_model(const ScenarioSpec& spec);

ControllerConfig controller_config(const ScenarioSpec& spec, const ScenarioModel& model);

}  // namespace fatpipe
