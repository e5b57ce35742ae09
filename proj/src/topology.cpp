#include "fatpipe/topology.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <tuple>

#include "fatpipe/errors.hpp"

namespace fatpipe {

NetworkTopology::NetworkTopology(std::vector<std::string> names, std::vector<FiberLink> links,
                                 std::vector<int> transceivers)
    : names_(std::move(names)),
      links_(std::move(links)),
      transceivers_(std::move(transceivers)),
      adjacency_(names_.size())
{
    for (const auto& link : links_) {
        adjacency_[link.a].push_back({link.b, link.length_km});
        adjacency_[link.b].push_back({link.a, link.length_km});
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end(),
                  [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    }
}

NodeId NetworkTopology::node_index(const std::string& name) const
{
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ConfigurationError("unknown node '" + name + "'");
    return static_cast<NodeId>(it - names_.begin());
}

double NetworkTopology::link_length(NodeId u, NodeId v) const
{
    for (const auto& n : adjacency_.at(u)) {
        if (n.node == v) return n.length_km;
    }
    return -1.0;
}

NetworkTopology build_network(const NetworkSpec& spec)
{
    std::vector<std::string> issues;
    if (spec.nodes.size() < 2) issues.push_back("network needs at least 2 nodes");

    std::map<std::string, NodeId> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        if (spec.nodes[i].empty()) issues.push_back("node " + std::to_string(i) + ": empty name");
        if (!index.emplace(spec.nodes[i], i).second)
            issues.push_back("node '" + spec.nodes[i] + "': duplicate name");
    }

    std::vector<FiberLink> links;
    std::vector<int> degree(spec.nodes.size(), 0);
    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t i = 0; i < spec.links.size(); ++i) {
        const auto& l = spec.links[i];
        const std::string where =
            "link " + std::to_string(i) + " (" + l.node_a + "-" + l.node_b + ")";
        const auto a = index.find(l.node_a);
        const auto b = index.find(l.node_b);
        bool ok = true;
        if (a == index.end()) {
            issues.push_back(where + ": unknown node '" + l.node_a + "'");
            ok = false;
        }
        if (b == index.end()) {
            issues.push_back(where + ": unknown node '" + l.node_b + "'");
            ok = false;
        }
        if (!(l.length_km > 0.0)) {
            issues.push_back(where + ": length must be positive");
            ok = false;
        }
        if (!ok) continue;
        if (a->second == b->second) {
            issues.push_back(where + ": self loop");
            continue;
        }
        const auto key = std::minmax(a->second, b->second);
        if (!seen.insert(key).second) {
            issues.push_back(where + ": duplicate link");
            continue;
        }
        links.push_back({a->second, b->second, l.length_km});
        ++degree[a->second];
        ++degree[b->second];
    }

    std::vector<int> transceivers(spec.nodes.size(), 0);
    for (const auto& [name, count] : spec.transceivers) {
        const auto it = index.find(name);
        if (it == index.end()) {
            issues.push_back("transceivers: unknown node '" + name + "'");
            continue;
        }
        if (count < 0) issues.push_back("transceivers." + name + ": must be nonnegative");
        transceivers[it->second] = count;
    }

    for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
        if (degree[v] < 2) {
            issues.push_back("node '" + spec.nodes[v] + "': connected by " +
                             std::to_string(degree[v]) + " link(s), needs at least 2");
        }
    }

    if (issues.empty() && !spec.nodes.empty()) {
        std::vector<std::vector<NodeId>> adj(spec.nodes.size());
        for (const auto& l : links) {
            adj[l.a].push_back(l.b);
            adj[l.b].push_back(l.a);
        }
        std::vector<bool> reached(spec.nodes.size(), false);
        std::vector<NodeId> stack{0};
        reached[0] = true;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : adj[u]) {
                if (!reached[v]) {
                    reached[v] = true;
                    stack.push_back(v);
                }
            }
        }
        for (std::size_t v = 0; v < reached.size(); ++v) {
            if (!reached[v]) issues.push_back("node '" + spec.nodes[v] + "': not connected to '" +
                                              spec.nodes[0] + "' (graph is disconnected)");
        }
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return NetworkTopology(spec.nodes, std::move(links), std::move(transceivers));
}

namespace {

double sequence_distance(const NetworkTopology& topology, const std::vector<NodeId>& nodes)
{
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) d += topology.link_length(nodes[i], nodes[i + 1]);
    return d;
}

}  // namespace

std::vector<CircuitPath> enumerate_circuit_paths(const NetworkTopology& topology,
                                                 double optical_reach_km,
                                                 std::size_t max_bypass_hops)
{
    const std::size_t max_hops = max_bypass_hops + 1;
    std::vector<CircuitPath> out;
    std::vector<NodeId> stack;
    std::vector<bool> on_path(topology.node_count(), false);

    auto dfs = [&](auto&& self, double dist) -> void {
        if (stack.size() >= 2) out.push_back({0, stack, dist});
        if (stack.size() - 1 == max_hops) return;
        for (const auto& n : topology.neighbors(stack.back())) {
            if (on_path[n.node]) continue;
            const double next = dist + n.length_km;
            if (next > optical_reach_km) continue;
            on_path[n.node] = true;
            stack.push_back(n.node);
            self(self, next);
            stack.pop_back();
            on_path[n.node] = false;
        }
    };

    for (NodeId s = 0; s < topology.node_count(); ++s) {
        stack = {s};
        on_path[s] = true;
        dfs(dfs, 0.0);
        on_path[s] = false;
    }

    std::sort(out.begin(), out.end(), [](const CircuitPath& x, const CircuitPath& y) {
        return std::make_tuple(x.hops(), std::cref(x.nodes)) <
               std::make_tuple(y.hops(), std::cref(y.nodes));
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i;
    return out;
}

std::string circuit_label(const NetworkTopology& topology, const CircuitPath& path)
{
    std::string s = "[";
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        if (i) s += ",";
        s += topology.node_name(path.nodes[i]);
    }
    return s + "]";
}

ConfigurationCatalog::ConfigurationCatalog(std::vector<CircuitPath> circuits,
                                           std::vector<Demand> demands,
                                           std::vector<PathConfiguration> configs,
                                           std::size_t node_count)
    : circuits_(std::move(circuits)),
      demands_(std::move(demands)),
      configs_(std::move(configs)),
      node_count_(node_count),
      by_demand_(demands_.size()),
      by_circuit_(circuits_.size())
{
    for (const auto& c : circuits_) lookup_.emplace(c.nodes, c.id);
    for (const auto& t : configs_) {
        by_demand_.at(t.demand).push_back(t.id);
        for (CircuitId c : t.segments) by_circuit_.at(c).push_back(t.id);
    }
}

bool ConfigurationCatalog::rho(CircuitId c, ConfigId t) const
{
    const auto& segs = configs_.at(t).segments;
    return std::find(segs.begin(), segs.end(), c) != segs.end();
}

bool ConfigurationCatalog::phi(NodeId v, CircuitId c) const
{
    const auto& path = circuits_.at(c);
    return path.source() == v || path.target() == v;
}

std::size_t ConfigurationCatalog::find_circuit(const std::vector<NodeId>& nodes) const
{
    const auto it = lookup_.find(nodes);
    return it == lookup_.end() ? npos : it->second;
}

namespace {

struct RouteKey {
    double distance;
    std::vector<NodeId> nodes;

    bool operator<(const RouteKey& o) const
    {
        if (distance != o.distance) return distance < o.distance;
        if (nodes.size() != o.nodes.size()) return nodes.size() < o.nodes.size();
        return nodes < o.nodes;
    }
    bool operator==(const RouteKey& o) const { return nodes == o.nodes; }
};

// Label-setting search ordered by (distance, hops, node sequence). The order is
// preserved under common suffix extension, so the first label settled at a node is
// the minimum under that order.
std::optional<RouteKey> shortest_route(const NetworkTopology& topology, NodeId s, NodeId t,
                                       const std::vector<bool>& blocked_nodes,
                                       const std::set<std::pair<NodeId, NodeId>>& blocked_edges)
{
    auto cmp = [](const RouteKey& x, const RouteKey& y) { return y < x; };
    std::priority_queue<RouteKey, std::vector<RouteKey>, decltype(cmp)> open(cmp);
    std::vector<bool> settled(topology.node_count(), false);
    open.push({0.0, {s}});
    while (!open.empty()) {
        RouteKey cur = open.top();
        open.pop();
        const NodeId u = cur.nodes.back();
        if (settled[u]) continue;
        settled[u] = true;
        if (u == t) return cur;
        for (const auto& n : topology.neighbors(u)) {
            if (settled[n.node] || blocked_nodes[n.node]) continue;
            if (blocked_edges.count({u, n.node})) continue;
            RouteKey next{cur.distance + n.length_km, cur.nodes};
            next.nodes.push_back(n.node);
            open.push(std::move(next));
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::vector<NodeId>> k_shortest_routes(const NetworkTopology& topology, NodeId s,
                                                   NodeId t, std::size_t k)
{
    std::vector<std::vector<NodeId>> result;
    if (k == 0 || s == t) return result;
    std::vector<bool> no_nodes(topology.node_count(), false);
    auto first = shortest_route(topology, s, t, no_nodes, {});
    if (!first) return result;

    std::vector<RouteKey> accepted{*first};
    std::set<RouteKey> candidates;
    while (accepted.size() < k) {
        const auto& last = accepted.back().nodes;
        for (std::size_t i = 0; i + 1 < last.size(); ++i) {
            const NodeId spur = last[i];
            const std::vector<NodeId> root(last.begin(), last.begin() + static_cast<long>(i) + 1);
            std::set<std::pair<NodeId, NodeId>> blocked_edges;
            for (const auto& p : accepted) {
                if (p.nodes.size() > i + 1 && std::equal(root.begin(), root.end(), p.nodes.begin()))
                    blocked_edges.insert({p.nodes[i], p.nodes[i + 1]});
            }
            std::vector<bool> blocked_nodes(topology.node_count(), false);
            for (std::size_t j = 0; j < i; ++j) blocked_nodes[root[j]] = true;
            auto spur_route = shortest_route(topology, spur, t, blocked_nodes, blocked_edges);
            if (!spur_route) continue;
            std::vector<NodeId> full = root;
            full.insert(full.end(), spur_route->nodes.begin() + 1, spur_route->nodes.end());
            RouteKey key{sequence_distance(topology, full), std::move(full)};
            if (std::find(accepted.begin(), accepted.end(), key) == accepted.end())
                candidates.insert(std::move(key));
        }
        if (candidates.empty()) break;
        accepted.push_back(*candidates.begin());
        candidates.erase(candidates.begin());
    }
    for (auto& r : accepted) result.push_back(std::move(r.nodes));
    return result;
}

ConfigurationCatalog generate_configurations(const NetworkTopology& topology,
                                             std::vector<CircuitPath> circuits,
                                             std::vector<Demand> demands, std::size_t k_routes)
{
    std::map<std::vector<NodeId>, CircuitId> lookup;
    for (const auto& c : circuits) lookup.emplace(c.nodes, c.id);

    std::vector<PathConfiguration> configs;
    for (std::size_t i = 0; i < demands.size(); ++i) {
        auto& d = demands[i];
        d.id = i;
        if (d.source == d.target)
            throw ConfigurationError("demand " + demand_label(topology, d) + ": source equals target");
        const auto routes = k_shortest_routes(topology, d.source, d.target, k_routes);
        const std::size_t before = configs.size();
        for (std::size_t r = 0; r < routes.size(); ++r) {
            const auto& route = routes[r];
            std::vector<CircuitId> segments;
            auto segment = [&](auto&& self, std::size_t from) -> void {
                if (from + 1 == route.size()) {
                    configs.push_back({configs.size(), d.id, r, segments});
                    return;
                }
                for (std::size_t len = route.size() - 1 - from; len >= 1; --len) {
                    const std::vector<NodeId> piece(route.begin() + static_cast<long>(from),
                                                    route.begin() + static_cast<long>(from + len) + 1);
                    const auto it = lookup.find(piece);
                    if (it == lookup.end()) continue;
                    segments.push_back(it->second);
                    self(self, from + len);
                    segments.pop_back();
                }
            };
            segment(segment, 0);
        }
        if (configs.size() == before)
            throw ConfigurationError("demand " + demand_label(topology, d) +
                                     ": no transmission path configuration available");
    }
    const std::size_t nodes = topology.node_count();
    return ConfigurationCatalog(std::move(circuits), std::move(demands), std::move(configs), nodes);
}

std::vector<Demand> all_pairs_demands(const NetworkTopology& topology, double h_avg)
{
    std::vector<Demand> out;
    for (NodeId s = 0; s < topology.node_count(); ++s) {
        for (NodeId t = 0; t < topology.node_count(); ++t) {
            if (s != t) out.push_back({out.size(), s, t, h_avg});
        }
    }
    return out;
}

std::string demand_label(const NetworkTopology& topology, const Demand& demand)
{
    return "[" + topology.node_name(demand.source) + "," + topology.node_name(demand.target) + "]";
}

}  // namespace fatpipe
