#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fatpipe/errors.hpp"
#include "fatpipe/flowsim.hpp"
#include "fatpipe/optimizer.hpp"
#include "fatpipe/runner.hpp"
#include "fatpipe/scenario.hpp"
#include "fixtures.hpp"

using namespace fatpipe;

namespace {

// Triangle with 60 km links: tau = 3 steps at T_sim = 0.1 ms, 5 us/km.
// Direct circuits only; demand A->C has [A,C] and [A,B],[B,C].
struct Chain {
    NetworkTopology topo = build_network(fixtures::triangle(60.0));
    ConfigurationCatalog cat = make();

    ConfigurationCatalog make() const
    {
        auto circuits = enumerate_circuit_paths(topo, kUnlimitedReach, 0);
        return generate_configurations(topo, circuits, {{0, 0, 2, 100.0}, {1, 0, 1, 100.0}}, 2);
    }
    ConfigId two_segment() const
    {
        for (ConfigId t : cat.configs_of(0))
            if (cat.configuration(t).segments.size() == 2) return t;
        return 0;
    }
    ConfigId direct(DemandId d) const
    {
        for (ConfigId t : cat.configs_of(d))
            if (cat.configuration(t).segments.size() == 1) return t;
        return 0;
    }
};

}  // namespace

TEST(FlowNetwork, StepCountForFiveSeconds)
{
    EXPECT_EQ(step_count(5.0, 1e-4), 50000u);
    EXPECT_EQ(step_count(0.001, 1e-4), 10u);
}

TEST(FlowNetwork, SingleSegmentArrivesSameStep)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 3));
    net.set_assignment(std::vector<ConfigId>{ch.direct(0), ch.direct(1)});
    const std::vector<double> h = {290.0, 0.0};
    net.step(h);
    const CircuitId c = ch.cat.configuration(ch.direct(0)).segments[0];
    EXPECT_DOUBLE_EQ(net.circuit_totals()[c].arrival, 290.0);
}

TEST(FlowNetwork, TwoSegmentPipelineDelay)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 3));
    const ConfigId t = ch.two_segment();
    net.set_assignment(std::vector<ConfigId>{t, ch.direct(1)});
    const CircuitId second = ch.cat.configuration(t).segments[1];
    ASSERT_EQ(net.tau()[ch.cat.configuration(t).segments[0]], 3u);
    const std::vector<double> h = {100.0, 0.0};
    for (int k = 0; k < 10; ++k) {
        net.step(h);
        EXPECT_DOUBLE_EQ(net.circuit_totals()[second].arrival, k < 3 ? 0.0 : 100.0) << "step " << k;
        EXPECT_DOUBLE_EQ(net.received()[0], k < 6 ? 0.0 : 100.0) << "step " << k;
    }
}

TEST(FlowNetwork, SharedCircuitSumsArrivals)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 3));
    const ConfigId t = ch.two_segment();
    net.set_assignment(std::vector<ConfigId>{t, ch.direct(1)});
    // Both demands start on [A,B].
    const std::vector<double> h = {100.0, 200.0};
    net.step(h);
    const CircuitId ab = ch.cat.configuration(t).segments[0];
    EXPECT_EQ(ab, ch.cat.configuration(ch.direct(1)).segments[0]);
    EXPECT_DOUBLE_EQ(net.circuit_totals()[ab].arrival, 300.0);
}

TEST(FlowNetwork, RoutingOverInactiveCircuitThrows)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 0));
    net.set_assignment(std::vector<ConfigId>{ch.direct(0), ch.direct(1)});
    EXPECT_THROW(net.step(std::vector<double>{1.0, 1.0}), RoutingError);
}

TEST(FlowNetwork, BacklogDrainsOverOldChainAfterReroute)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 1));
    net.set_assignment(std::vector<ConfigId>{ch.direct(0), ch.direct(1)});
    const std::vector<double> h = {150.0, 0.0};
    for (int k = 0; k < 100; ++k) net.step(h);
    const CircuitId ac = ch.cat.configuration(ch.direct(0)).segments[0];
    const double backlog = net.queue_per_circuit()[ac];
    ASSERT_GT(backlog, 0.0);
    net.set_assignment(std::vector<ConfigId>{ch.two_segment(), ch.direct(1)});
    for (int k = 0; k < 200; ++k) net.step(h);
    EXPECT_DOUBLE_EQ(net.queue_per_circuit()[ac], 0.0);
    const double balance = net.injected() - net.delivered() - net.lost() - net.residual_queue() - net.residual_transit();
    EXPECT_NEAR(balance, 0.0, 1e-9 * net.injected());
}

TEST(Simulate, ZeroTrafficHasNoLossOrQueues)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 1));
    net.set_assignment(std::vector<ConfigId>{ch.direct(0), ch.direct(1)});
    TrafficGenerator traffic({1.0, 0.0, 0.0, 0.0}, 2, 3);
    const RunReport r = simulate(net, traffic, nullptr, {0.05, 10});
    EXPECT_EQ(r.totals.lost, 0.0);
    EXPECT_EQ(r.totals.injected, 0.0);
    for (const auto& row : r.trace.queue_gbit)
        for (double q : row) EXPECT_EQ(q, 0.0);
    EXPECT_EQ(r.totals.relative_loss(), 0.0);
}

TEST(Simulate, AmpleCapacityHasNoLoss)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 10));
    net.set_assignment(std::vector<ConfigId>{ch.two_segment(), ch.direct(1)});
    TrafficGenerator traffic({5.0, 290.0, 30.0, 10.0}, 2, 3);
    const RunReport r = simulate(net, traffic, nullptr, {0.5, 100});
    EXPECT_EQ(r.totals.lost, 0.0);
    for (double f : r.max_queue_fill) EXPECT_EQ(f, 0.0);
}

TEST(Simulate, OverloadedRunConservesVolume)
{
    Chain ch;
    FlowNetwork net(ch.cat, {}, KernelMode::serial);
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), 3));
    net.set_assignment(std::vector<ConfigId>{ch.two_segment(), ch.direct(1)});
    TrafficGenerator traffic({5.0, 200.0, 60.0, 20.0}, 2, 9);
    const RunReport r = simulate(net, traffic, nullptr, {1.0, 50});
    EXPECT_GT(r.totals.lost, 0.0);
    EXPECT_LE(r.totals.conservation_error(), 1e-8);
    EXPECT_LE(r.max_step_conservation_error, 1e-9);
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t s = 1; s < r.trace.cum_loss.size(); ++s)
            EXPECT_GE(r.trace.cum_loss[s][d], r.trace.cum_loss[s - 1][d]);
}

TEST(Simulate, SerialAndParallelKernelsGiveIdenticalRuns)
{
    ScenarioSpec spec = fixtures::four_node_spec();
    spec.duration_s = 0.3;
    spec.kernel = KernelMode::serial;
    const RunReport a = run_scenario(spec);
    spec.kernel = KernelMode::parallel;
    const RunReport b = run_scenario(spec);
    EXPECT_EQ(summary_json(a), summary_json(b));
}

// Constant offered rates over one interval: the backlog change of a circuit
// matches the linear prediction (per circuit, scaled back by w).
TEST(Simulate, QueueChangeMatchesPrediction)
{
    Chain ch;
    const double T = 1e-4, dt = 0.1;
    FlowNetwork net(ch.cat, {1.0 * 100.0, 1.0, T, 5.0}, KernelMode::serial);
    const int w = 3;
    net.set_omega(std::vector<int>(ch.cat.circuits().size(), w));
    net.set_assignment(std::vector<ConfigId>{ch.direct(0), ch.direct(1)});
    const std::vector<double> h = {330.0, 0.0};
    const std::size_t steps = step_count(dt, T);
    for (std::size_t k = 0; k < steps; ++k) net.step(h);
    const CircuitId c = ch.cat.configuration(ch.direct(0)).segments[0];
    const double simulated = net.queue_per_circuit()[c];
    const double predicted = w * predicted_queue_delta(w, 100.0, dt, 330.0);
    EXPECT_NEAR(simulated, predicted, 330.0 * T);
}
