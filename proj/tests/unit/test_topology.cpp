#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fatpipe/errors.hpp"
#include "fatpipe/scenario.hpp"
#include "fatpipe/topology.hpp"
#include "fixtures.hpp"

using namespace fatpipe;

namespace {

std::vector<std::string> labels_of(const NetworkTopology& topo, const ConfigurationCatalog& cat, DemandId d)
{
    std::vector<std::string> out;
    for (ConfigId t : cat.configs_of(d)) {
        std::string s;
        for (CircuitId c : cat.configuration(t).segments) s += circuit_label(topo, cat.circuits()[c]);
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(Network, FourNodeTopologyHasTenFiberDirections)
{
    const ScenarioSpec spec = fixtures::four_node_spec();
    const NetworkTopology topo = build_network(spec.network);
    EXPECT_EQ(topo.node_count(), 4u);
    EXPECT_EQ(topo.fiber_direction_count(), 10u);
    for (NodeId v = 0; v < 4; ++v) EXPECT_EQ(topo.transceivers(v), 31);
}

TEST(Network, TwoNodesOneLinkRejected)
{
    NetworkSpec s;
    s.nodes = {"X", "Y"};
    s.links = {{"X", "Y", 10.0}};
    s.transceivers = {{"X", 4}, {"Y", 4}};
    try {
        build_network(s);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        ASSERT_FALSE(e.issues().empty());
        EXPECT_NE(e.issues().front().find("X"), std::string::npos);
    }
}

TEST(Network, RejectsNonpositiveLengthAndDisconnected)
{
    NetworkSpec s = fixtures::triangle();
    s.links[1].length_km = 0.0;
    EXPECT_THROW(build_network(s), ValidationError);

    NetworkSpec two_triangles;
    two_triangles.nodes = {"A", "B", "C", "D", "E", "F"};
    two_triangles.links = {{"A", "B", 1}, {"B", "C", 1}, {"A", "C", 1}, {"D", "E", 1}, {"E", "F", 1}, {"D", "F", 1}};
    for (const auto& n : two_triangles.nodes) two_triangles.transceivers[n] = 1;
    EXPECT_THROW(build_network(two_triangles), ValidationError);
}

TEST(Network, TriangleIsValid)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    EXPECT_EQ(topo.node_count(), 3u);
    EXPECT_DOUBLE_EQ(topo.link_length(0, 1), 100.0);
    EXPECT_LT(topo.link_length(0, 0), 0.0);
}

TEST(CircuitPaths, TriangleWithOneBypassGivesTwelve)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    const auto paths = enumerate_circuit_paths(topo, kUnlimitedReach, 1);
    EXPECT_EQ(paths.size(), 12u);
    std::size_t direct = 0;
    for (const auto& p : paths) {
        if (p.hops() == 1) {
            ++direct;
            EXPECT_DOUBLE_EQ(p.distance_km, 100.0);
        } else {
            EXPECT_DOUBLE_EQ(p.distance_km, 200.0);
        }
    }
    EXPECT_EQ(direct, 6u);
}

TEST(CircuitPaths, ReachFilterDropsBypasses)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    const auto paths = enumerate_circuit_paths(topo, 150.0, 1);
    EXPECT_EQ(paths.size(), 6u);
    for (const auto& p : paths) EXPECT_EQ(p.hops(), 1u);
}

TEST(CircuitPaths, PathsAreLoopFreeAndFollowLinks)
{
    const NetworkTopology topo = build_network(fixtures::four_node_spec().network);
    const auto paths = enumerate_circuit_paths(topo, 3000.0, 2);
    for (const auto& p : paths) {
        std::set<NodeId> seen(p.nodes.begin(), p.nodes.end());
        EXPECT_EQ(seen.size(), p.nodes.size());
        double d = 0.0;
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
            const double len = topo.link_length(p.nodes[i], p.nodes[i + 1]);
            ASSERT_GT(len, 0.0);
            d += len;
        }
        EXPECT_DOUBLE_EQ(d, p.distance_km);
    }
}

TEST(Catalog, FourNodeCatalogHasBypassAndSegmentPair)
{
    const ScenarioModel m = build_model(fixtures::four_node_spec());
    const NodeId n1 = m.topology.node_index("N1"), n2 = m.topology.node_index("N2"), n3 = m.topology.node_index("N3");
    const CircuitId bypass = m.catalog.find_circuit({n2, n3, n1});
    const CircuitId first = m.catalog.find_circuit({n2, n3});
    const CircuitId second = m.catalog.find_circuit({n3, n1});
    ASSERT_NE(bypass, ConfigurationCatalog::npos);
    ASSERT_NE(first, ConfigurationCatalog::npos);
    ASSERT_NE(second, ConfigurationCatalog::npos);

    DemandId d21 = 0;
    for (const auto& d : m.catalog.demands())
        if (d.source == n2 && d.target == n1) d21 = d.id;
    const auto labels = labels_of(m.topology, m.catalog, d21);
    auto pos = [&](const std::string& s) { return std::find(labels.begin(), labels.end(), s) - labels.begin(); };
    const auto p_bypass = pos("[N2,N3,N1]");
    const auto p_pair = pos("[N2,N3][N3,N1]");
    ASSERT_LT(p_bypass, static_cast<long>(labels.size()));
    ASSERT_LT(p_pair, static_cast<long>(labels.size()));
    // Same route: the single bypass comes before its segmentation.
    EXPECT_EQ(p_pair, p_bypass + 1);
}

TEST(Catalog, SingleLinkRouteHasOneConfiguration)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    auto circuits = enumerate_circuit_paths(topo, kUnlimitedReach, 1);
    const ConfigurationCatalog cat = generate_configurations(topo, circuits, {{0, 0, 1, 10.0}}, 1);
    ASSERT_EQ(cat.configs_of(0).size(), 1u);
    EXPECT_EQ(cat.configuration(cat.configs_of(0)[0]).segments.size(), 1u);
}

TEST(Catalog, TriangleSegmentations)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    auto circuits = enumerate_circuit_paths(topo, kUnlimitedReach, 1);
    const ConfigurationCatalog cat = generate_configurations(topo, circuits, {{0, 0, 2, 10.0}}, 2);
    const auto labels = labels_of(topo, cat, 0);
    const std::vector<std::string> expected = {"[A,C]", "[A,B,C]", "[A,B][B,C]"};
    EXPECT_EQ(labels, expected);
}

TEST(Catalog, IncidenceInvariants)
{
    const ScenarioModel m = build_model(fixtures::four_node_spec());
    const auto& cat = m.catalog;
    for (const auto& c : cat.circuits()) {
        int sum = 0;
        for (NodeId v = 0; v < cat.node_count(); ++v) sum += cat.phi(v, c.id) ? 1 : 0;
        EXPECT_EQ(sum, 2);
    }
    for (const auto& t : cat.configurations()) {
        const Demand& d = cat.demands()[t.demand];
        NodeId at = d.source;
        std::set<CircuitId> used;
        for (CircuitId c : t.segments) {
            EXPECT_EQ(cat.circuits()[c].source(), at);
            at = cat.circuits()[c].target();
            EXPECT_TRUE(used.insert(c).second);
        }
        EXPECT_EQ(at, d.target);
        for (const auto& c : cat.circuits()) EXPECT_EQ(cat.rho(c.id, t.id), used.count(c.id) == 1);
    }
    for (const auto& d : cat.demands()) EXPECT_FALSE(cat.configs_of(d.id).empty());
}

TEST(Catalog, EnumerationIsDeterministic)
{
    const ScenarioModel a = build_model(fixtures::four_node_spec());
    const ScenarioModel b = build_model(fixtures::four_node_spec());
    EXPECT_EQ(a.config_labels, b.config_labels);
    EXPECT_EQ(a.circuit_labels, b.circuit_labels);
}

TEST(Catalog, DemandWithoutCandidatesIsAnError)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    // Only the A->B circuit exists, so a demand B->C has no configuration.
    std::vector<CircuitPath> circuits = {{0, {0, 1}, 100.0}};
    EXPECT_THROW(generate_configurations(topo, circuits, {{0, 1, 2, 1.0}}, 3), ConfigurationError);
}

TEST(Routes, KShortestOrder)
{
    const NetworkTopology topo = build_network(fixtures::four_node_spec().network);
    const NodeId n1 = topo.node_index("N1"), n2 = topo.node_index("N2");
    const auto routes = k_shortest_routes(topo, n2, n1, 3);
    ASSERT_EQ(routes.size(), 3u);
    auto length = [&](const std::vector<NodeId>& r) {
        double d = 0.0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) d += topo.link_length(r[i], r[i + 1]);
        return d;
    };
    EXPECT_LE(length(routes[0]), length(routes[1]));
    EXPECT_LE(length(routes[1]), length(routes[2]));
    EXPECT_EQ(routes[0], (std::vector<NodeId>{n2, topo.node_index("N3"), n1}));
}
