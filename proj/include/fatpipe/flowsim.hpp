#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fatpipe/queue_kernel.hpp"
#include "fatpipe/report.hpp"
#include "fatpipe/topology.hpp"
#include "fatpipe/traffic.hpp"

namespace fatpipe {

struct FlowParams {
    double xi = 100.0;          // Gbit/s per circuit
    double q_ratio = 0.05;      // s
    double t_sim = 1e-4;        // s
    double vp_us_per_km = 5.0;  // propagation, us/km
};

enum class KernelMode { automatic, serial, parallel };

/// Circuits with at least this many entries make KernelMode::automatic pick the
/// OpenMP kernel.
inline constexpr std::size_t kParallelCircuitThreshold = 64;

/// All circuit paths of a catalog with their queues, plus the in-transit pipeline
/// between consecutive segments of each configuration.
///
/// Every circuit owns one queue slot per configuration that uses it. Data keeps
/// following the configuration it entered with, so backlog left behind by a
/// reroute drains over its old chain.
class FlowNetwork {
public:
    FlowNetwork(const ConfigurationCatalog& catalog, const FlowParams& params,
                KernelMode kernel = KernelMode::automatic);

    const ConfigurationCatalog& catalog() const { return *catalog_; }
    const FlowParams& params() const { return params_; }

    void set_omega(std::span<const int> omega);
    /// One configuration per demand; must belong to that demand.
    void set_assignment(std::span<const ConfigId> assignment);

    std::span<const int> omega() const { return omega_; }
    std::span<const ConfigId> assignment() const { return assignment_; }
    std::span<const CircuitRuntime> circuits() const { return circuits_; }
    std::span<const std::size_t> tau() const { return tau_; }

    /// Advances one step with the given offered rates. Throws RoutingError if an
    /// assigned configuration crosses a circuit with omega = 0.
    void step(std::span<const double> offered);

    std::size_t steps_done() const { return step_; }

    // Last step, per demand (Gbit/s).
    std::span<const double> received() const { return received_; }
    std::span<const double> step_loss() const { return step_loss_; }
    // Last step, per circuit.
    std::span<const QueueTotals> circuit_totals() const { return buffers_.totals; }

    // Whole-run volumes (Gbit).
    std::span<const double> cumulative_loss() const { return cum_loss_; }
    std::span<const double> injected_per_demand() const { return injected_; }
    std::span<const double> delivered_per_demand() const { return delivered_; }
    double injected() const;
    double delivered() const;
    double lost() const;
    double residual_queue() const;
    double residual_transit() const;

    /// Largest relative per-circuit, per-step balance error seen so far.
    double max_step_conservation_error() const { return max_step_error_; }
    /// Steps in which some circuit held backlog while omega = 0.
    std::size_t stranded_steps() const { return stranded_steps_; }

    std::vector<double> queue_per_circuit() const;

private:
    struct Transit {
        ConfigId config;
        std::size_t next_segment;
        double rate;
    };

    void check_routing();

    const ConfigurationCatalog* catalog_;
    FlowParams params_;
    KernelMode kernel_;
    std::vector<CircuitRuntime> circuits_;
    SlotBuffers buffers_;
    std::vector<std::size_t> tau_;
    std::vector<int> omega_;
    std::vector<ConfigId> assignment_;
    bool routing_checked_ = false;

    // slot_of_[t][j]: global slot of segment j of configuration t.
    std::vector<std::vector<std::size_t>> slot_of_;
    std::vector<ConfigId> slot_config_;
    std::vector<std::size_t> slot_segment_;

    std::vector<std::vector<Transit>> ring_;
    std::size_t step_ = 0;

    std::vector<double> received_, step_loss_, cum_loss_, injected_, delivered_;
    double max_step_error_ = 0.0;
    std::size_t stranded_steps_ = 0;
};

/// Called once per step after traffic sampling and before the queues advance.
class ControlHooks {
public:
    virtual ~ControlHooks() = default;
    virtual void on_step(std::size_t step, double time_s, FlowNetwork& network,
                         std::span<const double> offered) = 0;
    virtual std::vector<EventRecord> events() const { return {}; }
    virtual std::size_t reconfigurations() const { return 0; }
};

struct SimulationOptions {
    double duration_s = 5.0;
    /// Record every n-th step in the trace; 0 disables traces.
    std::size_t trace_every = 100;
};

/// Number of steps for a horizon: ceil(duration / t_sim), robust to rounding.
std::size_t step_count(double duration_s, double t_sim);

/// Drives traffic, control hooks and the network for the whole horizon.
/// Summary statistics are gathered at full resolution regardless of trace_every.
RunReport simulate(FlowNetwork& network, TrafficGenerator& traffic, ControlHooks* hooks,
                   const SimulationOptions& options);

}  // namespace fatpipe
