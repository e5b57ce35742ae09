#include "fatpipe/queue_kernel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace fatpipe {

std::size_t propagation_steps(double distance_km, double vp_us_per_km, double t_sim_us)
{
    assert(distance_km > 0.0 && vp_us_per_km > 0.0 && t_sim_us > 0.0);
    // Guard against representation noise, e.g. 2000.0000000001 / 100.
    const double ratio = vp_us_per_km * distance_km / t_sim_us;
    const double snapped = std::round(ratio);
    const double steps = std::abs(ratio - snapped) < 1e-9 * std::max(1.0, snapped) ? snapped : std::ceil(ratio);
    return static_cast<std::size_t>(std::max(1.0, steps));
}

double CircuitRuntime::total_queue() const
{
    double q = 0.0;
    for (double v : queues) q += v;
    return q;
}

QueueTotals step_circuit(CircuitRuntime& circuit, std::span<const double> arrivals, double t_sim,
                         std::span<double> transmitted, std::span<double> lost)
{
    const std::size_t n = circuit.queues.size();
    assert(arrivals.size() == n && transmitted.size() == n && lost.size() == n);

    QueueTotals t;
    const double mu = circuit.service_rate();
    const double q_limit = circuit.queue_limit();
    for (std::size_t i = 0; i < n; ++i) {
        assert(arrivals[i] >= 0.0);
        t.arrival += arrivals[i];
        t.q_prev += circuit.queues[i];
    }
    const double a = t.arrival;
    const double q_prev = t.q_prev;

    // 1) draining
    t.drain = std::min(mu, q_prev / t_sim);
    // 2) non-queued transmission
    t.nqt = std::min(a, std::max(0.0, mu - q_prev / t_sim));
    // 3) filling the queue
    t.q_free = std::min(q_limit, std::max(0.0, q_limit - q_prev) + t.drain * t_sim);
    t.overload = std::max(a - t.nqt, 0.0);
    t.fill = std::min(t.overload, t.q_free / t_sim);
    // 4) loss
    t.loss = std::max(t.overload - t.fill, 0.0);

    // 5) per-flow values
    for (std::size_t i = 0; i < n; ++i) {
        const double alpha = a > 0.0 ? std::min(1.0, arrivals[i] / a) : 0.0;
        const double gamma = q_prev > 0.0 ? std::min(1.0, circuit.queues[i] / q_prev) : 0.0;
        lost[i] = a > 0.0 ? arrivals[i] / a * t.loss : 0.0;
        transmitted[i] = alpha * t.nqt + gamma * t.drain;
        circuit.queues[i] =
            std::max(t_sim * (alpha * t.fill - gamma * t.drain) + circuit.queues[i], 0.0);
        t.transmitted += transmitted[i];
        t.q_new += circuit.queues[i];
    }
    return t;
}

void SlotBuffers::resize_for(std::span<const CircuitRuntime> circuits)
{
    offset.assign(circuits.size() + 1, 0);
    for (std::size_t c = 0; c < circuits.size(); ++c) offset[c + 1] = offset[c] + circuits[c].flows.size();
    arrivals.assign(offset.back(), 0.0);
    transmitted.assign(offset.back(), 0.0);
    lost.assign(offset.back(), 0.0);
    totals.assign(circuits.size(), QueueTotals{});
}

void step_circuits_serial(std::span<CircuitRuntime> circuits, SlotBuffers& buffers, double t_sim)
{
    for (std::size_t c = 0; c < circuits.size(); ++c) {
        buffers.totals[c] = step_circuit(circuits[c], buffers.arrivals_of(c), t_sim,
                                         buffers.transmitted_of(c), buffers.lost_of(c));
    }
}

void step_circuits_parallel(std::span<CircuitRuntime> circuits, SlotBuffers& buffers, double t_sim)
{
    const auto count = static_cast<long>(circuits.size());
#pragma omp parallel for schedule(static)
    for (long c = 0; c < count; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        buffers.totals[idx] = step_circuit(circuits[idx], buffers.arrivals_of(idx), t_sim,
                                           buffers.transmitted_of(idx), buffers.lost_of(idx));
    }
}

}  // namespace fatpipe
