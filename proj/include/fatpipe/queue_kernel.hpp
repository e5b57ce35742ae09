#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fatpipe/topology.hpp"

namespace fatpipe {

/// mu_c = xi * omega.
inline double service_rate(double xi, int omega) { return xi * static_cast<double>(omega); }

/// tau_c = ceil(v_p * D_c / T_sim), with v_p in us/km and T_sim in us.
std::size_t propagation_steps(double distance_km, double vp_us_per_km, double t_sim_us);

/// Dynamic state of one circuit path. A flow is one transmission path
/// configuration using this circuit; each gets a fixed slot.
struct CircuitRuntime {
    CircuitId circuit = 0;
    int omega = 0;
    double xi = 100.0;       // Gbit/s per circuit
    double q_ratio = 0.05;   // s
    std::vector<ConfigId> flows;
    std::vector<double> queues;  // Gbit per slot

    double service_rate() const { return fatpipe::service_rate(xi, omega); }
    double queue_limit() const { return service_rate() * q_ratio * 1.0; }
    double total_queue() const;
};

/// Aggregate quantities of one circuit for one step (rates in Gbit/s, volumes in Gbit).
struct QueueTotals {
    double arrival = 0.0;
    double drain = 0.0;
    double nqt = 0.0;
    double q_free = 0.0;
    double overload = 0.0;
    double fill = 0.0;
    double loss = 0.0;
    double transmitted = 0.0;
    double q_prev = 0.0;
    double q_new = 0.0;
};

/// One step of the lossy queue model for a single circuit path.
///
/// Order: drain, non-queued transmission, free space, overload, fill, loss, then
/// per-flow loss, arrival share alpha, queue share gamma, transmission b and
/// queue contents. Updates circuit.queues in place and writes per-slot b and l.
QueueTotals step_circuit(CircuitRuntime& circuit, std::span<const double> arrivals, double t_sim,
                         std::span<double> transmitted, std::span<double> lost);

/// Flat per-slot buffers for every circuit of a network; circuit c owns slots
/// [offset[c], offset[c + 1]).
struct SlotBuffers {
    std::vector<std::size_t> offset;
    std::vector<double> arrivals;
    std::vector<double> transmitted;
    std::vector<double> lost;
    std::vector<QueueTotals> totals;

    void resize_for(std::span<const CircuitRuntime> circuits);
    std::span<double> arrivals_of(std::size_t c) { return slice(arrivals, c); }
    std::span<double> transmitted_of(std::size_t c) { return slice(transmitted, c); }
    std::span<double> lost_of(std::size_t c) { return slice(lost, c); }

private:
    std::span<double> slice(std::vector<double>& v, std::size_t c)
    {
        return std::span<double>(v).subspan(offset[c], offset[c + 1] - offset[c]);
    }
};

/// Reference implementation: circuits stepped one after another.
void step_circuits_serial(std::span<CircuitRuntime> circuits, SlotBuffers& buffers, double t_sim);

/// OpenMP version; circuits are independent within a step, results land in fixed slots.
void step_circuits_parallel(std::span<CircuitRuntime> circuits, SlotBuffers& buffers, double t_sim);

}  // namespace fatpipe
