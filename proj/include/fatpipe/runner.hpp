#pragma once

#include <cstdint>
#include <vector>

#include "fatpipe/report.hpp"
#include "fatpipe/scenario.hpp"

namespace fatpipe {

/// Runs one scenario end to end under its own mode and seed.
RunReport run_scenario(const ScenarioSpec& spec, const ScenarioModel& model);
RunReport run_scenario(const ScenarioSpec& spec);

/// Runs every seed in both control modes. Replicas are independent; with
/// parallel = true they are spread over OpenMP threads. Rows follow seed order.
Comparison compare_modes(const ScenarioSpec& spec, const ScenarioModel& model,
                         const std::vector<std::uint64_t>& seeds, bool parallel = true);

}  // namespace fatpipe
