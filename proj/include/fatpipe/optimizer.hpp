#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fatpipe/bnb_solver.hpp"
#include "fatpipe/ilp.hpp"
#include "fatpipe/topology.hpp"

namespace fatpipe {

// ---------------------------------------------------------------------------
// Resource allocation: choose one configuration per demand and the number of
// active circuits w_c per circuit path, minimizing the total circuit count.

struct AllocationModel {
    IlpProblem problem;
    std::vector<std::size_t> g_var;  // per configuration id
    std::vector<std::size_t> w_var;  // per circuit id
};

struct AllocationResult {
    std::vector<ConfigId> chosen;  // per demand
    std::vector<int> w;            // per circuit
    double objective = 0.0;
    std::size_t nodes = 0;
};

/// Variables: g per configuration (catalog order), then w per circuit with bounds
/// 0..min(eta at both endpoints). Rows: one-hot per demand, capacity per circuit
/// (-xi*w + sum pi*h*g <= 0), transceivers per node (sum w*phi <= eta).
AllocationModel build_allocation_ilp(const ConfigurationCatalog& catalog, std::span<const double> h_avg,
                                     double pi, double xi, std::span<const int> eta);

AllocationResult decode_allocation(const ConfigurationCatalog& catalog, const AllocationModel& model,
                                   const Assignment& assignment);

/// Builds and solves exactly. Throws InfeasibleError with a per-node diagnostic.
AllocationResult solve_allocation(const ConfigurationCatalog& catalog, std::span<const double> h_avg,
                                  double pi, double xi, std::span<const int> eta,
                                  const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// Resource reoccupation: reroute demands over the active circuits so that the
// largest predicted per-circuit backlog after delta_t is minimal.

/// How the measured backlog q_c enters the capacity rows.
enum class QueueNormalization {
    total,                // q_c
    per_circuit,          // q_c / w_c (Gbit per active circuit)
    per_circuit_seconds,  // q_c / (w_c * xi), every row divided by xi
};

const char* to_string(QueueNormalization n);
/// Accepts "total", "per_circuit", "per_circuit_seconds"; throws ConfigurationError.
QueueNormalization queue_normalization_from_string(const std::string& s);

struct ReoccupationInput {
    std::span<const double> h_now;  // per demand, Gbit/s
    std::span<const int> w;         // per circuit
    std::span<const double> q;      // per circuit, Gbit
    double delta_t = 0.1;           // s
    double xi = 100.0;              // Gbit/s
    QueueNormalization normalization = QueueNormalization::per_circuit;
    /// Optional current configuration per demand. When set, it is declared first
    /// among its demand's candidates so ties keep the current routing.
    std::span<const ConfigId> current = {};
};

struct ReoccupationModel {
    IlpProblem problem;
    std::vector<ConfigId> configs;      // kept configurations, in declaration order
    std::vector<std::size_t> g_var;     // parallel to configs
    std::size_t q_max_var = 0;
    std::vector<CircuitId> rows;        // circuit of each capacity row
};

struct ReoccupationResult {
    std::vector<ConfigId> chosen;  // per demand
    double q_max = 0.0;            // in normalized units
    std::size_t nodes = 0;
};

/// Configurations touching a circuit with w = 0 are pruned; a demand left without
/// candidates raises InfeasibleError.
ReoccupationModel build_reoccupation_ilp(const ConfigurationCatalog& catalog, const ReoccupationInput& in);

ReoccupationResult decode_reoccupation(const ConfigurationCatalog& catalog, const ReoccupationModel& model,
                                       const Assignment& assignment);

ReoccupationResult solve_reoccupation(const ConfigurationCatalog& catalog, const ReoccupationInput& in,
                                      const SolverOptions& options = {});

/// Predicted change of the per-circuit backlog over delta_t: (delta_t / w)(-xi w + load).
/// Throws ConfigurationError for w < 1.
double predicted_queue_delta(int w, double xi, double delta_t, double load);

/// Load per circuit implied by a choice of configurations and offered rates.
std::vector<double> circuit_loads(const ConfigurationCatalog& catalog, std::span<const ConfigId> chosen,
                                  std::span<const double> h);

}  // namespace fatpipe
