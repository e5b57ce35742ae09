#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace fatpipe {

using NodeId = std::size_t;
using CircuitId = std::size_t;
using DemandId = std::size_t;
using ConfigId = std::size_t;

struct LinkSpec {
    std::string node_a;
    std::string node_b;
    double length_km = 0.0;
};

/// Raw description of the physical network, as read from a scenario file.
struct NetworkSpec {
    std::vector<std::string> nodes;
    std::vector<LinkSpec> links;
    std::map<std::string, int> transceivers;
};

struct FiberLink {
    NodeId a = 0;
    NodeId b = 0;
    double length_km = 0.0;
};

/// Validated node/link graph. Links are bidirectional; each carries one fiber per direction.
class NetworkTopology {
public:
    NetworkTopology(std::vector<std::string> names, std::vector<FiberLink> links,
                    std::vector<int> transceivers);

    std::size_t node_count() const { return names_.size(); }
    const std::vector<std::string>& node_names() const { return names_; }
    const std::string& node_name(NodeId v) const { return names_.at(v); }
    NodeId node_index(const std::string& name) const;

    const std::vector<FiberLink>& links() const { return links_; }
    std::size_t fiber_direction_count() const { return 2 * links_.size(); }

    /// Transceivers installed at v (eta_v).
    int transceivers(NodeId v) const { return transceivers_.at(v); }

    struct Neighbor {
        NodeId node;
        double length_km;
    };
    /// Neighbors sorted by node id.
    const std::vector<Neighbor>& neighbors(NodeId v) const { return adjacency_.at(v); }

    /// Length of the link between u and v, or a negative value if there is none.
    double link_length(NodeId u, NodeId v) const;

private:
    std::vector<std::string> names_;
    std::vector<FiberLink> links_;
    std::vector<int> transceivers_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

/// Validates a network description (>= 2 nodes, every node on >= 2 links, positive lengths,
/// connected, no duplicate links, known node names) and builds the topology.
/// Throws ValidationError listing every offending element.
NetworkTopology build_network(const NetworkSpec& spec);

/// Abstract unidirectional optical transmission section, possibly bypassing
/// intermediate nodes.
struct CircuitPath {
    CircuitId id = 0;
    std::vector<NodeId> nodes;
    double distance_km = 0.0;

    NodeId source() const { return nodes.front(); }
    NodeId target() const { return nodes.back(); }
    std::size_t hops() const { return nodes.size() - 1; }
    std::size_t bypassed_nodes() const { return nodes.size() - 2; }
};

inline constexpr double kUnlimitedReach = std::numeric_limits<double>::infinity();

/// Every loop-free link sequence with at most max_bypass_hops intermediate nodes and
/// total length within optical_reach_km, in both directions. Ordered by hop count,
/// then node sequence; ids are positions in that order.
std::vector<CircuitPath> enumerate_circuit_paths(const NetworkTopology& topology,
                                                 double optical_reach_km,
                                                 std::size_t max_bypass_hops);

std::string circuit_label(const NetworkTopology& topology, const CircuitPath& path);

struct Demand {
    DemandId id = 0;
    NodeId source = 0;
    NodeId target = 0;
    double h_avg = 0.0;  // Gbit/s
};

/// One way to carry a demand: a source-to-target chain of circuit paths.
struct PathConfiguration {
    ConfigId id = 0;
    DemandId demand = 0;
    std::size_t route_rank = 0;
    std::vector<CircuitId> segments;
};

/// Candidate configurations T_d for every demand, with the incidence constants
/// rho(c, t) and phi(v, c).
class ConfigurationCatalog {
public:
    ConfigurationCatalog(std::vector<CircuitPath> circuits, std::vector<Demand> demands,
                         std::vector<PathConfiguration> configs, std::size_t node_count);

    const std::vector<CircuitPath>& circuits() const { return circuits_; }
    const std::vector<Demand>& demands() const { return demands_; }
    const std::vector<PathConfiguration>& configurations() const { return configs_; }
    const PathConfiguration& configuration(ConfigId t) const { return configs_.at(t); }

    /// Configuration ids of demand d, in catalog order.
    const std::vector<ConfigId>& configs_of(DemandId d) const { return by_demand_.at(d); }
    /// Configuration ids whose chain contains circuit c.
    const std::vector<ConfigId>& configs_using(CircuitId c) const { return by_circuit_.at(c); }

    bool rho(CircuitId c, ConfigId t) const;
    bool phi(NodeId v, CircuitId c) const;

    std::size_t node_count() const { return node_count_; }

    /// Index of the circuit path with this exact node sequence, or npos.
    std::size_t find_circuit(const std::vector<NodeId>& nodes) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<CircuitPath> circuits_;
    std::vector<Demand> demands_;
    std::vector<PathConfiguration> configs_;
    std::size_t node_count_;
    std::vector<std::vector<ConfigId>> by_demand_;
    std::vector<std::vector<ConfigId>> by_circuit_;
    std::map<std::vector<NodeId>, CircuitId> lookup_;
};

/// Up to k loop-free routes from s to t, shortest distance first (ties: fewer
/// hops, then lexicographic node sequence). Yen's algorithm.
std::vector<std::vector<NodeId>> k_shortest_routes(const NetworkTopology& topology, NodeId s,
                                                   NodeId t, std::size_t k);

/// For every demand: the first k_routes loop-free routes, and for each route every
/// segmentation into consecutive existing circuit paths. Segmentations of one
/// route are ordered lexicographically by segment hop counts, longest first.
/// Throws ConfigurationError naming a demand whose candidate set ends up empty.
ConfigurationCatalog generate_configurations(const NetworkTopology& topology,
                                             std::vector<CircuitPath> circuits,
                                             std::vector<Demand> demands, std::size_t k_routes);

/// All ordered node pairs as demands with the same long-term mean.
std::vector<Demand> all_pairs_demands(const NetworkTopology& topology, double h_avg);

std::string demand_label(const NetworkTopology& topology, const Demand& demand);

}  // namespace fatpipe
