#include "fatpipe/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fatpipe/errors.hpp"

namespace fatpipe {

using nlohmann::json;

namespace {

// Collects every issue instead of stopping at the first one.
class Reader {
public:
    std::vector<std::string> issues;

    void error(const std::string& where, const std::string& what) { issues.push_back(where + ": " + what); }

    // Object at key, or nullptr. Reports a type error if present but not an object.
    const json* section(const json& parent, const std::string& key, const std::string& where, bool required)
    {
        if (!parent.contains(key)) {
            if (required) issues.push_back("missing " + key + " section");
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            error(where, "must be an object");
            return nullptr;
        }
        return &v;
    }

    void known_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys)
    {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k)) error(where + "." + k, "unknown field");
    }

    enum class Bound { any, nonnegative, positive };

    void number(const json& obj, const std::string& key, const std::string& where, double& out, Bound bound,
                bool required = false)
    {
        const std::string loc = where + "." + key;
        if (!obj.contains(key)) {
            if (required) error(loc, "missing field");
            return;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) {
            error(loc, "must be a number");
            return;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) error(loc, "must be finite");
        else if (bound == Bound::positive && !(x > 0.0)) error(loc, "must be positive");
        else if (bound == Bound::nonnegative && x < 0.0) error(loc, "must be nonnegative");
        else out = x;
    }

    template <typename Int>
    void integer(const json& obj, const std::string& key, const std::string& where, Int& out, long long min,
                 bool required = false)
    {
        const std::string loc = where + "." + key;
        if (!obj.contains(key)) {
            if (required) error(loc, "missing field");
            return;
        }
        const json& v = obj.at(key);
        if (v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())) {
            const long long x = v.is_number_unsigned() ? static_cast<long long>(v.get<unsigned long long>())
                                                        : static_cast<long long>(v.get<double>());
            if (x < min) error(loc, "must be at least " + std::to_string(min));
            else out = static_cast<Int>(x);
        } else {
            error(loc, "must be an integer");
        }
    }

    void boolean(const json& obj, const std::string& key, const std::string& where, bool& out)
    {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_boolean()) error(where + "." + key, "must be true or false");
        else out = obj.at(key).get<bool>();
    }

    bool string(const json& obj, const std::string& key, const std::string& where, std::string& out,
                bool required = false)
    {
        if (!obj.contains(key)) {
            if (required) error(where + "." + key, "missing field");
            return false;
        }
        if (!obj.at(key).is_string()) {
            error(where + "." + key, "must be a string");
            return false;
        }
        out = obj.at(key).get<std::string>();
        return true;
    }
};

void read_topology(Reader& r, const json& t, ScenarioSpec& s)
{
    r.known_keys(t, "topology", {"nodes", "links", "transceivers"});
    if (!t.contains("nodes") || !t.at("nodes").is_array()) {
        r.error("topology.nodes", "missing or not a list of names");
    } else {
        std::size_t i = 0;
        for (const auto& n : t.at("nodes")) {
            if (n.is_string()) s.network.nodes.push_back(n.get<std::string>());
            else r.error("topology.nodes[" + std::to_string(i) + "]", "must be a string");
            ++i;
        }
    }
    if (!t.contains("links") || !t.at("links").is_array()) {
        r.error("topology.links", "missing or not a list");
    } else {
        std::size_t i = 0;
        for (const auto& l : t.at("links")) {
            const std::string where = "topology.links[" + std::to_string(i++) + "]";
            if (!l.is_object()) {
                r.error(where, "must be an object");
                continue;
            }
            r.known_keys(l, where, {"a", "b", "length_km"});
            LinkSpec link;
            r.string(l, "a", where, link.node_a, true);
            r.string(l, "b", where, link.node_b, true);
            link.length_km = -1.0;
            r.number(l, "length_km", where, link.length_km, Reader::Bound::positive, true);
            s.network.links.push_back(link);
        }
    }
    if (!t.contains("transceivers")) {
        r.error("topology.transceivers", "missing field");
    } else if (const json& tr = t.at("transceivers"); tr.is_number_integer()) {
        const long long n = tr.get<long long>();
        if (n < 0) r.error("topology.transceivers", "must be nonnegative");
        for (const auto& node : s.network.nodes) s.network.transceivers[node] = static_cast<int>(n);
    } else if (tr.is_object()) {
        for (const auto& [node, v] : tr.items()) {
            if (!v.is_number_integer()) r.error("topology.transceivers." + node, "must be an integer");
            else s.network.transceivers[node] = v.get<int>();
        }
    } else {
        r.error("topology.transceivers", "must be an integer or a per-node object");
    }
}

void read_traffic(Reader& r, const json& t, ScenarioSpec& s)
{
    r.known_keys(t, "traffic", {"seed", "lambda_per_s", "mu_b_gbps", "sigma_b_gbps", "sigma_st_gbps", "demands"});
    if (!t.contains("seed")) r.error("traffic.seed", "missing field");
    else if (!t.at("seed").is_number_unsigned()) r.error("traffic.seed", "must be a nonnegative integer");
    else s.seed = t.at("seed").get<std::uint64_t>();
    using B = Reader::Bound;
    r.number(t, "lambda_per_s", "traffic", s.traffic.lambda_bursts_per_s, B::nonnegative);
    r.number(t, "mu_b_gbps", "traffic", s.traffic.mu_b, B::nonnegative);
    r.number(t, "sigma_b_gbps", "traffic", s.traffic.sigma_b, B::nonnegative);
    r.number(t, "sigma_st_gbps", "traffic", s.traffic.sigma_st, B::nonnegative);
    if (!t.contains("demands")) return;
    const json& d = t.at("demands");
    if (d.is_string()) {
        if (d.get<std::string>() != "all_pairs") r.error("traffic.demands", "unknown demand set '" + d.get<std::string>() + "'");
        return;
    }
    if (!d.is_array()) {
        r.error("traffic.demands", "must be \"all_pairs\" or a list");
        return;
    }
    std::size_t i = 0;
    for (const auto& item : d) {
        const std::string where = "traffic.demands[" + std::to_string(i++) + "]";
        if (!item.is_object()) {
            r.error(where, "must be an object");
            continue;
        }
        r.known_keys(item, where, {"source", "target", "h_avg_gbps"});
        DemandSpec ds;
        ds.h_avg = s.traffic.mu_b;
        r.string(item, "source", where, ds.source, true);
        r.string(item, "target", where, ds.target, true);
        r.number(item, "h_avg_gbps", where, ds.h_avg, B::nonnegative);
        s.demands.push_back(ds);
    }
}

void read_sim(Reader& r, const json& t, ScenarioSpec& s)
{
    r.known_keys(t, "sim", {"t_sim_s", "duration_s", "q_ratio_s", "xi_gbps", "vp_us_per_km", "trace_every", "kernel"});
    using B = Reader::Bound;
    r.number(t, "t_sim_s", "sim", s.flow.t_sim, B::positive);
    r.number(t, "duration_s", "sim", s.duration_s, B::positive);
    r.number(t, "q_ratio_s", "sim", s.flow.q_ratio, B::positive);
    r.number(t, "xi_gbps", "sim", s.flow.xi, B::positive);
    r.number(t, "vp_us_per_km", "sim", s.flow.vp_us_per_km, B::positive);
    r.integer(t, "trace_every", "sim", s.trace_every, 0);
    std::string kernel;
    if (r.string(t, "kernel", "sim", kernel)) {
        if (kernel == "auto") s.kernel = KernelMode::automatic;
        else if (kernel == "serial") s.kernel = KernelMode::serial;
        else if (kernel == "parallel") s.kernel = KernelMode::parallel;
        else r.error("sim.kernel", "unknown kernel '" + kernel + "'");
    }
}

void read_controller(Reader& r, const json& t, ScenarioSpec& s)
{
    r.known_keys(t, "controller",
                 {"mode", "pi", "poll_interval_s", "telemetry_delay_s", "apply_delay_s", "reoccupation_interval_s",
                  "allocation_interval_s", "solver_latency_s", "allocation_basis", "queue_normalization", "sticky"});
    using B = Reader::Bound;
    std::string mode;
    if (r.string(t, "mode", "controller", mode)) {
        if (mode == "allocation") s.mode = ControlMode::allocation_only;
        else if (mode == "reoccupation") s.mode = ControlMode::reoccupation;
        else r.error("controller.mode", "unknown mode '" + mode + "'");
    }
    r.number(t, "pi", "controller", s.pi, B::positive);
    if (t.contains("pi") && t.at("pi").is_number() && t.at("pi").get<double>() < 1.0)
        r.error("controller.pi", "must be at least 1");
    auto& tm = s.timings;
    r.number(t, "poll_interval_s", "controller", tm.poll_interval, B::positive);
    r.number(t, "telemetry_delay_s", "controller", tm.telemetry_delay, B::nonnegative);
    r.number(t, "apply_delay_s", "controller", tm.apply_delay, B::nonnegative);
    r.number(t, "reoccupation_interval_s", "controller", tm.reoccupation_interval, B::positive);
    r.number(t, "allocation_interval_s", "controller", tm.allocation_interval, B::nonnegative);
    r.number(t, "solver_latency_s", "controller", tm.solver_latency, B::nonnegative);
    std::string basis;
    if (r.string(t, "allocation_basis", "controller", basis)) {
        if (basis == "configured") s.allocation_basis = AllocationBasis::configured;
        else if (basis == "snapshot") s.allocation_basis = AllocationBasis::snapshot;
        else r.error("controller.allocation_basis", "unknown basis '" + basis + "'");
    }
    std::string norm;
    if (r.string(t, "queue_normalization", "controller", norm)) {
        try {
            s.normalization = queue_normalization_from_string(norm);
        } catch (const ConfigurationError&) {
            r.error("controller.queue_normalization", "unknown normalization '" + norm + "'");
        }
    }
    r.boolean(t, "sticky", "controller", s.sticky);
}

void read_solver(Reader& r, const json& t, ScenarioSpec& s)
{
    r.known_keys(t, "solver", {"backend", "node_budget", "anneal"});
    std::string backend;
    if (r.string(t, "backend", "solver", backend)) {
        if (backend == "exact") s.backend = SolverBackend::exact;
        else if (backend == "qubo-anneal") s.backend = SolverBackend::qubo_anneal;
        else r.error("solver.backend", "unknown backend '" + backend + "'");
    }
    r.integer(t, "node_budget", "solver", s.node_budget, 1);
    if (const json* a = r.section(t, "anneal", "solver.anneal", false)) {
        r.known_keys(*a, "solver.anneal", {"sweeps", "restarts", "t_initial", "t_final", "seed"});
        r.integer(*a, "sweeps", "solver.anneal", s.anneal.sweeps, 1);
        r.integer(*a, "restarts", "solver.anneal", s.anneal.restarts, 1);
        r.number(*a, "t_initial", "solver.anneal", s.anneal.t_initial, Reader::Bound::positive);
        r.number(*a, "t_final", "solver.anneal", s.anneal.t_final, Reader::Bound::positive);
        r.integer(*a, "seed", "solver.anneal", s.anneal.seed, 0);
    }
}

void read_catalog(Reader& r, const json& t, ScenarioSpec& s)
{
    r.known_keys(t, "catalog", {"k_routes", "max_bypass_hops", "optical_reach_km"});
    r.integer(t, "k_routes", "catalog", s.k_routes, 1);
    r.integer(t, "max_bypass_hops", "catalog", s.max_bypass_hops, 0);
    r.number(t, "optical_reach_km", "catalog", s.optical_reach_km, Reader::Bound::positive);
}

// Timings must land on whole steps.
void check_grid(Reader& r, double seconds, double t_sim, const char* where)
{
    const double steps = seconds / t_sim;
    if (std::fabs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
        r.error(where, "must be a whole multiple of sim.t_sim_s");
}

}  // namespace

ScenarioSpec parse_scenario_text(const std::string& text)
{
    Reader r;
    ScenarioSpec s;
    json root;
    bool blank = true;
    for (char ch : text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
    if (blank) {
        root = json::object();
    } else {
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError({std::string("syntax: ") + e.what()});
        }
    }
    if (!root.is_object()) throw ValidationError({"document: must be a JSON object"});

    r.known_keys(root, "document",
                 {"schema_version", "name", "topology", "traffic", "sim", "controller", "solver", "catalog"});
    if (!root.contains("schema_version")) {
        r.error("schema_version", "missing field");
    } else if (!root.at("schema_version").is_number_integer() ||
               root.at("schema_version").get<int>() != kScenarioSchemaVersion) {
        r.error("schema_version", "unsupported, expected " + std::to_string(kScenarioSchemaVersion));
    }
    r.string(root, "name", "document", s.name);

    if (const json* t = r.section(root, "topology", "topology", true)) read_topology(r, *t, s);
    if (const json* t = r.section(root, "traffic", "traffic", true)) read_traffic(r, *t, s);
    if (const json* t = r.section(root, "sim", "sim", false)) read_sim(r, *t, s);
    if (const json* t = r.section(root, "controller", "controller", false)) read_controller(r, *t, s);
    if (const json* t = r.section(root, "solver", "solver", false)) read_solver(r, *t, s);
    if (const json* t = r.section(root, "catalog", "catalog", false)) read_catalog(r, *t, s);

    const auto& tm = s.timings;
    if (tm.telemetry_delay > tm.poll_interval)
        r.error("controller.telemetry_delay_s", "must not exceed controller.poll_interval_s");
    if (r.issues.empty()) {
        const double T = s.flow.t_sim;
        check_grid(r, tm.poll_interval, T, "controller.poll_interval_s");
        check_grid(r, tm.telemetry_delay, T, "controller.telemetry_delay_s");
        check_grid(r, tm.apply_delay, T, "controller.apply_delay_s");
        check_grid(r, tm.reoccupation_interval, T, "controller.reoccupation_interval_s");
        check_grid(r, tm.allocation_interval, T, "controller.allocation_interval_s");
        check_grid(r, tm.solver_latency, T, "controller.solver_latency_s");
    }
    if (r.issues.empty()) {
        // Structural topology checks, reported with the same location prefix.
        try {
            build_network(s.network);
        } catch (const ValidationError& e) {
            for (const auto& issue : e.issues()) r.issues.push_back("topology: " + issue);
        }
    }
    if (!r.issues.empty()) throw ValidationError(r.issues);
    return s;
}

ScenarioSpec parse_scenario_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError({path + ": cannot open file"});
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string to_json(const ScenarioSpec& s)
{
    nlohmann::ordered_json j;
    j["schema_version"] = s.schema_version;
    j["name"] = s.name;
    auto& topo = j["topology"];
    topo["nodes"] = s.network.nodes;
    topo["links"] = nlohmann::ordered_json::array();
    for (const auto& l : s.network.links) topo["links"].push_back({{"a", l.node_a}, {"b", l.node_b}, {"length_km", l.length_km}});
    topo["transceivers"] = s.network.transceivers;
    auto& tr = j["traffic"];
    tr["seed"] = s.seed;
    tr["lambda_per_s"] = s.traffic.lambda_bursts_per_s;
    tr["mu_b_gbps"] = s.traffic.mu_b;
    tr["sigma_b_gbps"] = s.traffic.sigma_b;
    tr["sigma_st_gbps"] = s.traffic.sigma_st;
    if (s.demands.empty()) {
        tr["demands"] = "all_pairs";
    } else {
        tr["demands"] = nlohmann::ordered_json::array();
        for (const auto& d : s.demands) tr["demands"].push_back({{"source", d.source}, {"target", d.target}, {"h_avg_gbps", d.h_avg}});
    }
    auto& sim = j["sim"];
    sim["t_sim_s"] = s.flow.t_sim;
    sim["duration_s"] = s.duration_s;
    sim["q_ratio_s"] = s.flow.q_ratio;
    sim["xi_gbps"] = s.flow.xi;
    sim["vp_us_per_km"] = s.flow.vp_us_per_km;
    sim["trace_every"] = s.trace_every;
    sim["kernel"] = s.kernel == KernelMode::automatic ? "auto" : s.kernel == KernelMode::serial ? "serial" : "parallel";
    auto& c = j["controller"];
    c["mode"] = to_string(s.mode);
    c["pi"] = s.pi;
    c["poll_interval_s"] = s.timings.poll_interval;
    c["telemetry_delay_s"] = s.timings.telemetry_delay;
    c["apply_delay_s"] = s.timings.apply_delay;
    c["reoccupation_interval_s"] = s.timings.reoccupation_interval;
    c["allocation_interval_s"] = s.timings.allocation_interval;
    c["solver_latency_s"] = s.timings.solver_latency;
    c["allocation_basis"] = to_string(s.allocation_basis);
    c["queue_normalization"] = to_string(s.normalization);
    c["sticky"] = s.sticky;
    auto& so = j["solver"];
    so["backend"] = to_string(s.backend);
    so["node_budget"] = s.node_budget;
    so["anneal"] = {{"sweeps", s.anneal.sweeps},
                    {"restarts", s.anneal.restarts},
                    {"t_initial", s.anneal.t_initial},
                    {"t_final", s.anneal.t_final},
                    {"seed", s.anneal.seed}};
    auto& cat = j["catalog"];
    cat["k_routes"] = s.k_routes;
    cat["max_bypass_hops"] = s.max_bypass_hops;
    cat["optical_reach_km"] = s.optical_reach_km;
    return j.dump(2) + "\n";
}

namespace {

ConfigurationCatalog make_catalog(const NetworkTopology& topology, const ScenarioSpec& spec)
{
    auto circuits = enumerate_circuit_paths(topology, spec.optical_reach_km, spec.max_bypass_hops);
    std::vector<Demand> demands;
    if (spec.demands.empty()) {
        demands = all_pairs_demands(topology, spec.traffic.mu_b);
    } else {
        std::vector<std::string> issues;
        for (std::size_t i = 0; i < spec.demands.size(); ++i) {
            const auto& ds = spec.demands[i];
            Demand d;
            d.id = i;
            d.h_avg = ds.h_avg;
            try {
                d.source = topology.node_index(ds.source);
                d.target = topology.node_index(ds.target);
            } catch (const std::exception&) {
                issues.push_back("traffic.demands[" + std::to_string(i) + "]: unknown node");
                continue;
            }
            if (d.source == d.target) issues.push_back("traffic.demands[" + std::to_string(i) + "]: source equals target");
            demands.push_back(d);
        }
        if (!issues.empty()) throw ValidationError(issues);
    }
    return generate_configurations(topology, std::move(circuits), std::move(demands), spec.k_routes);
}

}  // namespace

ScenarioModel build_model(const ScenarioSpec& spec)
{
    NetworkTopology topology = build_network(spec.network);
    ConfigurationCatalog catalog = make_catalog(topology, spec);
    ScenarioModel m{std::move(topology), std::move(catalog), {}, {}, {}, {}};
    for (const auto& d : m.catalog.demands()) m.demand_labels.push_back(demand_label(m.topology, d));
    for (const auto& c : m.catalog.circuits()) m.circuit_labels.push_back(circuit_label(m.topology, c));
    for (const auto& t : m.catalog.configurations()) {
        std::string label;
        for (std::size_t j = 0; j < t.segments.size(); ++j)
            label += (j ? "," : "") + m.circuit_labels[t.segments[j]];
        m.config_labels.push_back(label);
    }
    for (NodeId v = 0; v < m.topology.node_count(); ++v) m.eta.push_back(m.topology.transceivers(v));
    return m;
}

ControllerConfig controller_config(const ScenarioSpec& spec, const ScenarioModel& model)
{
    ControllerConfig c;
    c.timings = spec.timings;
    c.mode = spec.mode;
    c.pi = spec.pi;
    c.xi = spec.flow.xi;
    c.eta = model.eta;
    for (const auto& d : model.catalog.demands()) c.h_avg.push_back(d.h_avg);
    c.allocation_basis = spec.allocation_basis;
    c.normalization = spec.normalization;
    c.sticky = spec.sticky;
    c.backend = spec.backend;
    c.anneal = spec.anneal;
    c.solver.node_budget = spec.node_budget;
    return c;
}

}  // namespace fatpipe
