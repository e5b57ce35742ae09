#include "fatpipe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fatpipe/errors.hpp"

namespace fatpipe {

AllocationModel build_allocation_ilp(const ConfigurationCatalog& catalog, std::span<const double> h_avg,
                                     double pi, double xi, std::span<const int> eta)
{
    const auto& demands = catalog.demands();
    const auto& circuits = catalog.circuits();
    if (h_avg.size() != demands.size())
        throw ConfigurationError("allocation: expected " + std::to_string(demands.size()) + " demand rates");
    if (eta.size() != catalog.node_count())
        throw ConfigurationError("allocation: expected " + std::to_string(catalog.node_count()) +
                                 " transceiver counts");

    AllocationModel m;
    m.g_var.resize(catalog.configurations().size());
    for (DemandId d = 0; d < demands.size(); ++d)
        for (ConfigId t : catalog.configs_of(d)) m.g_var[t] = m.problem.add_binary("g_" + std::to_string(t));
    m.w_var.resize(circuits.size());
    for (const auto& c : circuits) {
        const long upper = std::min(eta[c.source()], eta[c.target()]);
        m.w_var[c.id] = m.problem.add_integer("w_" + std::to_string(c.id), 0, std::max(0L, upper));
    }

    for (DemandId d = 0; d < demands.size(); ++d) {
        std::vector<Term> terms;
        for (ConfigId t : catalog.configs_of(d)) terms.push_back({m.g_var[t], 1.0});
        m.problem.add_constraint("select_" + std::to_string(d), std::move(terms), Sense::equal, 1.0);
    }
    for (const auto& c : circuits) {
        std::vector<Term> terms{{m.w_var[c.id], -xi}};
        for (ConfigId t : catalog.configs_using(c.id)) {
            const double load = pi * h_avg[catalog.configuration(t).demand];
            if (load != 0.0) terms.push_back({m.g_var[t], load});
        }
        m.problem.add_constraint("capacity_" + std::to_string(c.id), std::move(terms), Sense::less_equal, 0.0);
    }
    for (NodeId v = 0; v < catalog.node_count(); ++v) {
        std::vector<Term> terms;
        for (const auto& c : circuits)
            if (catalog.phi(v, c.id)) terms.push_back({m.w_var[c.id], 1.0});
        if (terms.empty()) continue;
        m.problem.add_constraint("transceivers_" + std::to_string(v), std::move(terms), Sense::less_equal,
                                 static_cast<double>(eta[v]));
    }

    std::vector<Term> objective;
    for (const auto& c : circuits) objective.push_back({m.w_var[c.id], 1.0});
    m.problem.set_objective(std::move(objective));
    return m;
}

AllocationResult decode_allocation(const ConfigurationCatalog& catalog, const AllocationModel& model,
                                   const Assignment& assignment)
{
    AllocationResult r;
    r.chosen.assign(catalog.demands().size(), ConfigurationCatalog::npos);
    for (const auto& cfg : catalog.configurations())
        if (assignment.values[model.g_var[cfg.id]] > 0.5) r.chosen[cfg.demand] = cfg.id;
    r.w.resize(catalog.circuits().size());
    for (std::size_t c = 0; c < r.w.size(); ++c)
        r.w[c] = static_cast<int>(std::lround(assignment.values[model.w_var[c]]));
    r.objective = assignment.objective;
    return r;
}

namespace {

std::string allocation_diagnostic(const ConfigurationCatalog& catalog, std::span<const double> h_avg,
                                  double pi, double xi, std::span<const int> eta)
{
    // Every circuit leaving v carries all traffic sourced at v, every circuit
    // entering v all traffic destined to v; both count against eta_v.
    std::vector<double> out(catalog.node_count(), 0.0), in(catalog.node_count(), 0.0);
    for (const auto& d : catalog.demands()) {
        out[d.source] += pi * h_avg[d.id];
        in[d.target] += pi * h_avg[d.id];
    }
    std::ostringstream msg;
    msg << "allocation infeasible";
    bool any = false;
    for (NodeId v = 0; v < catalog.node_count(); ++v) {
        const double need = std::ceil(out[v] / xi - 1e-9) + std::ceil(in[v] / xi - 1e-9);
        if (need > eta[v]) {
            msg << (any ? "; " : ": ") << "node " << v << " needs at least " << need << " transceivers, has "
                << eta[v];
            any = true;
        }
    }
    if (!any) msg << ": transceiver limits are jointly binding across nodes";
    return msg.str();
}

}  // namespace

AllocationResult solve_allocation(const ConfigurationCatalog& catalog, std::span<const double> h_avg,
                                  double pi, double xi, std::span<const int> eta, const SolverOptions& options)
{
    const AllocationModel model = build_allocation_ilp(catalog, h_avg, pi, xi, eta);
    const SolveResult res = solve(model.problem, options);
    if (!res.feasible()) throw InfeasibleError(allocation_diagnostic(catalog, h_avg, pi, xi, eta));
    AllocationResult out = decode_allocation(catalog, model, res.assignment);
    out.nodes = res.nodes;
    return out;
}

const char* to_string(QueueNormalization n)
{
    switch (n) {
    case QueueNormalization::total: return "total";
    case QueueNormalization::per_circuit: return "per_circuit";
    case QueueNormalization::per_circuit_seconds: return "per_circuit_seconds";
    }
    return "?";
}

QueueNormalization queue_normalization_from_string(const std::string& s)
{
    if (s == "total") return QueueNormalization::total;
    if (s == "per_circuit") return QueueNormalization::per_circuit;
    if (s == "per_circuit_seconds") return QueueNormalization::per_circuit_seconds;
    throw ConfigurationError("unknown queue normalization '" + s + "'");
}

ReoccupationModel build_reoccupation_ilp(const ConfigurationCatalog& catalog, const ReoccupationInput& in)
{
    const auto& demands = catalog.demands();
    const auto& circuits = catalog.circuits();
    if (in.h_now.size() != demands.size() || in.w.size() != circuits.size() || in.q.size() != circuits.size())
        throw ConfigurationError("reoccupation: input sizes do not match the catalog");
    if (!in.current.empty() && in.current.size() != demands.size())
        throw ConfigurationError("reoccupation: current assignment size does not match the catalog");

    // Row scaling: seconds normalization divides every row by xi.
    const bool seconds = in.normalization == QueueNormalization::per_circuit_seconds;
    const double unit = seconds ? in.xi : 1.0;

    auto usable = [&](ConfigId t) {
        for (CircuitId c : catalog.configuration(t).segments)
            if (in.w[c] <= 0) return false;
        return true;
    };

    ReoccupationModel m;
    if (seconds) m.problem.set_coefficient_scale(1e6);
    std::vector<std::size_t> var_of(catalog.configurations().size(), static_cast<std::size_t>(-1));
    for (DemandId d = 0; d < demands.size(); ++d) {
        std::vector<ConfigId> kept;
        for (ConfigId t : catalog.configs_of(d))
            if (usable(t)) kept.push_back(t);
        if (kept.empty())
            throw InfeasibleError("reoccupation: demand " + std::to_string(d) +
                                  " has no configuration over active circuits");
        if (!in.current.empty()) {
            auto it = std::find(kept.begin(), kept.end(), in.current[d]);
            if (it != kept.end()) std::rotate(kept.begin(), it, it + 1);
        }
        for (ConfigId t : kept) {
            var_of[t] = m.problem.add_binary("g_" + std::to_string(t));
            m.configs.push_back(t);
            m.g_var.push_back(var_of[t]);
        }
    }

    auto backlog = [&](CircuitId c) {
        const double q = in.q[c];
        if (in.normalization == QueueNormalization::total) return q;
        return q / static_cast<double>(in.w[c]) / unit;
    };

    // Upper bound of q_max: the worst row activity over any choice, and at
    // least the full-drain range.
    double max_backlog = 0.0, needed = 0.0;
    for (const auto& c : circuits) {
        if (in.w[c.id] <= 0) continue;
        max_backlog = std::max(max_backlog, backlog(c.id));
        std::vector<double> per_demand(demands.size(), 0.0);
        for (ConfigId t : catalog.configs_using(c.id)) {
            if (var_of[t] == static_cast<std::size_t>(-1)) continue;
            const DemandId d = catalog.configuration(t).demand;
            per_demand[d] = std::max(per_demand[d], in.h_now[d]);
        }
        double load = 0.0;
        for (double h : per_demand) load += h;
        const double coef = in.delta_t / static_cast<double>(in.w[c.id]) / unit;
        needed = std::max(needed, coef * load - (in.xi * in.delta_t / unit - backlog(c.id)));
    }
    const double hi = std::ceil(std::max(in.xi * in.delta_t / unit + max_backlog, needed) + 1.0);
    m.q_max_var = m.problem.add_continuous("q_max", 0.0, hi);

    for (DemandId d = 0; d < demands.size(); ++d) {
        std::vector<Term> terms;
        for (ConfigId t : catalog.configs_of(d))
            if (var_of[t] != static_cast<std::size_t>(-1)) terms.push_back({var_of[t], 1.0});
        m.problem.add_constraint("select_" + std::to_string(d), std::move(terms), Sense::equal, 1.0);
    }
    for (const auto& c : circuits) {
        if (in.w[c.id] <= 0) continue;
        const double coef = in.delta_t / static_cast<double>(in.w[c.id]) / unit;
        std::vector<Term> terms;
        for (ConfigId t : catalog.configs_using(c.id)) {
            if (var_of[t] == static_cast<std::size_t>(-1)) continue;
            const double a = coef * in.h_now[catalog.configuration(t).demand];
            if (a != 0.0) terms.push_back({var_of[t], a});
        }
        terms.push_back({m.q_max_var, -1.0});
        m.problem.add_constraint("queue_" + std::to_string(c.id), std::move(terms), Sense::less_equal,
                                 in.xi * in.delta_t / unit - backlog(c.id));
        m.rows.push_back(c.id);
    }
    m.problem.set_objective({{m.q_max_var, 1.0}});
    return m;
}

ReoccupationResult decode_reoccupation(const ConfigurationCatalog& catalog, const ReoccupationModel& model,
                                       const Assignment& assignment)
{
    ReoccupationResult r;
    r.chosen.assign(catalog.demands().size(), ConfigurationCatalog::npos);
    for (std::size_t i = 0; i < model.configs.size(); ++i) {
        if (assignment.values[model.g_var[i]] > 0.5) {
            const ConfigId t = model.configs[i];
            r.chosen[catalog.configuration(t).demand] = t;
        }
    }
    r.q_max = assignment.values[model.q_max_var];
    return r;
}

ReoccupationResult solve_reoccupation(const ConfigurationCatalog& catalog, const ReoccupationInput& in,
                                      const SolverOptions& options)
{
    const ReoccupationModel model = build_reoccupation_ilp(catalog, in);
    const SolveResult res = solve(model.problem, options);
    if (!res.feasible()) throw InfeasibleError("reoccupation ILP infeasible");
    ReoccupationResult out = decode_reoccupation(catalog, model, res.assignment);
    out.nodes = res.nodes;
    return out;
}

double predicted_queue_delta(int w, double xi, double delta_t, double load)
{
    if (w < 1) throw ConfigurationError("predicted_queue_delta: w must be at least 1");
    const double wd = static_cast<double>(w);
    return delta_t / wd * (-xi * wd + load);
}

std::vector<double> circuit_loads(const ConfigurationCatalog& catalog, std::span<const ConfigId> chosen,
                                  std::span<const double> h)
{
    std::vector<double> load(catalog.circuits().size(), 0.0);
    for (DemandId d = 0; d < chosen.size(); ++d)
        for (CircuitId c : catalog.configuration(chosen[d]).segments) load[c] += h[d];
    return load;
}

}  // namespace fatpipe
