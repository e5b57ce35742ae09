#include "fatpipe/flowsim.hpp"

#include <algorithm>
#include <cmath>

#include "fatpipe/errors.hpp"

namespace fatpipe {

FlowNetwork::FlowNetwork(const ConfigurationCatalog& catalog, const FlowParams& params, KernelMode kernel)
    : catalog_(&catalog), params_(params), kernel_(kernel)
{
    const auto& paths = catalog.circuits();
    const auto& configs = catalog.configurations();
    circuits_.resize(paths.size());
    tau_.resize(paths.size());
    std::size_t max_tau = 1;
    for (const auto& p : paths) {
        CircuitRuntime& rt = circuits_[p.id];
        rt.circuit = p.id;
        rt.xi = params.xi;
        rt.q_ratio = params.q_ratio;
        rt.flows = catalog.configs_using(p.id);
        rt.queues.assign(rt.flows.size(), 0.0);
        tau_[p.id] = propagation_steps(p.distance_km, params.vp_us_per_km, params.t_sim * 1e6);
        max_tau = std::max(max_tau, tau_[p.id]);
    }
    buffers_.resize_for(circuits_);

    slot_of_.resize(configs.size());
    for (const auto& t : configs) slot_of_[t.id].assign(t.segments.size(), 0);
    slot_config_.resize(buffers_.offset.back());
    slot_segment_.resize(buffers_.offset.back());
    for (const auto& rt : circuits_) {
        for (std::size_t i = 0; i < rt.flows.size(); ++i) {
            const std::size_t slot = buffers_.offset[rt.circuit] + i;
            const ConfigId t = rt.flows[i];
            const auto& segs = configs[t].segments;
            const std::size_t j = static_cast<std::size_t>(std::find(segs.begin(), segs.end(), rt.circuit) - segs.begin());
            slot_of_[t][j] = slot;
            slot_config_[slot] = t;
            slot_segment_[slot] = j;
        }
    }

    ring_.resize(max_tau + 1);
    omega_.assign(paths.size(), 0);
    const std::size_t nd = catalog.demands().size();
    assignment_.resize(nd);
    for (DemandId d = 0; d < nd; ++d) assignment_[d] = catalog.configs_of(d).front();
    received_.assign(nd, 0.0);
    step_loss_.assign(nd, 0.0);
    cum_loss_.assign(nd, 0.0);
    injected_.assign(nd, 0.0);
    delivered_.assign(nd, 0.0);
}

void FlowNetwork::set_omega(std::span<const int> omega)
{
    if (omega.size() != circuits_.size()) throw ConfigurationError("omega: wrong circuit count");
    for (std::size_t c = 0; c < circuits_.size(); ++c) {
        if (omega[c] < 0) throw ConfigurationError("omega: negative circuit count");
        omega_[c] = omega[c];
        circuits_[c].omega = omega[c];
    }
    routing_checked_ = false;
}

void FlowNetwork::set_assignment(std::span<const ConfigId> assignment)
{
    if (assignment.size() != assignment_.size()) throw ConfigurationError("assignment: wrong demand count");
    for (DemandId d = 0; d < assignment.size(); ++d) {
        const ConfigId t = assignment[d];
        if (t >= catalog_->configurations().size() || catalog_->configuration(t).demand != d)
            throw ConfigurationError("assignment: configuration " + std::to_string(t) +
                                     " does not belong to demand " + std::to_string(d));
        assignment_[d] = t;
    }
    routing_checked_ = false;
}

void FlowNetwork::check_routing()
{
    for (DemandId d = 0; d < assignment_.size(); ++d) {
        for (CircuitId c : catalog_->configuration(assignment_[d]).segments) {
            if (omega_[c] <= 0)
                throw RoutingError("demand " + std::to_string(d) + " is routed over circuit path " +
                                   std::to_string(c) + " which has no active circuits");
        }
    }
    routing_checked_ = true;
}

void FlowNetwork::step(std::span<const double> offered)
{
    if (offered.size() != assignment_.size()) throw ConfigurationError("step: wrong demand count");
    if (!routing_checked_) check_routing();
    const double T = params_.t_sim;
    const auto& configs = catalog_->configurations();

    std::fill(buffers_.arrivals.begin(), buffers_.arrivals.end(), 0.0);
    std::fill(received_.begin(), received_.end(), 0.0);
    std::fill(step_loss_.begin(), step_loss_.end(), 0.0);

    for (DemandId d = 0; d < offered.size(); ++d) {
        buffers_.arrivals[slot_of_[assignment_[d]][0]] += offered[d];
        injected_[d] += offered[d] * T;
    }

    auto& due = ring_[step_ % ring_.size()];
    for (const Transit& tr : due) {
        const auto& cfg = configs[tr.config];
        if (tr.next_segment == cfg.segments.size()) received_[cfg.demand] += tr.rate;
        else buffers_.arrivals[slot_of_[tr.config][tr.next_segment]] += tr.rate;
    }
    due.clear();
    for (DemandId d = 0; d < received_.size(); ++d) delivered_[d] += received_[d] * T;

    const bool parallel = kernel_ == KernelMode::parallel ||
                          (kernel_ == KernelMode::automatic && circuits_.size() >= kParallelCircuitThreshold);
    if (parallel) step_circuits_parallel(circuits_, buffers_, T);
    else step_circuits_serial(circuits_, buffers_, T);

    bool stranded = false;
    for (std::size_t c = 0; c < circuits_.size(); ++c) {
        const QueueTotals& qt = buffers_.totals[c];
        const double in = qt.arrival * T;
        const double out = (qt.transmitted + qt.loss) * T + (qt.q_new - qt.q_prev);
        const double ref = std::max({in, qt.transmitted * T, qt.q_prev, qt.q_new, 1e-300});
        max_step_error_ = std::max(max_step_error_, std::fabs(in - out) / ref);
        if (omega_[c] == 0 && qt.q_new > 0.0) stranded = true;

        const std::size_t target = (step_ + tau_[c]) % ring_.size();
        for (std::size_t s = buffers_.offset[c]; s < buffers_.offset[c + 1]; ++s) {
            const double b = buffers_.transmitted[s];
            if (b > 0.0) ring_[target].push_back({slot_config_[s], slot_segment_[s] + 1, b});
            const double l = buffers_.lost[s];
            if (l > 0.0) step_loss_[configs[slot_config_[s]].demand] += l;
        }
    }
    if (stranded) ++stranded_steps_;
    for (DemandId d = 0; d < step_loss_.size(); ++d) cum_loss_[d] += step_loss_[d] * T;
    ++step_;
}

double FlowNetwork::injected() const
{
    double v = 0.0;
    for (double x : injected_) v += x;
    return v;
}

double FlowNetwork::delivered() const
{
    double v = 0.0;
    for (double x : delivered_) v += x;
    return v;
}

double FlowNetwork::lost() const
{
    double v = 0.0;
    for (double x : cum_loss_) v += x;
    return v;
}

double FlowNetwork::residual_queue() const
{
    double v = 0.0;
    for (const auto& rt : circuits_) v += rt.total_queue();
    return v;
}

double FlowNetwork::residual_transit() const
{
    double v = 0.0;
    for (const auto& bucket : ring_)
        for (const Transit& tr : bucket) v += tr.rate * params_.t_sim;
    return v;
}

std::vector<double> FlowNetwork::queue_per_circuit() const
{
    std::vector<double> q(circuits_.size());
    for (std::size_t c = 0; c < circuits_.size(); ++c) q[c] = circuits_[c].total_queue();
    return q;
}

std::size_t step_count(double duration_s, double t_sim)
{
    if (!(duration_s > 0.0) || !(t_sim > 0.0)) return 0;
    return static_cast<std::size_t>(std::ceil(duration_s / t_sim - 1e-9));
}

RunReport simulate(FlowNetwork& network, TrafficGenerator& traffic, ControlHooks* hooks,
                   const SimulationOptions& options)
{
    const auto& catalog = network.catalog();
    const double T = network.params().t_sim;
    const std::size_t steps = step_count(options.duration_s, T);
    const std::size_t nc = catalog.circuits().size();

    RunReport report;
    report.t_sim = T;
    report.duration_s = options.duration_s;
    report.max_queue_fill.assign(nc, 0.0);

    auto record = [&](double time, std::span<const double> offered) {
        auto& tr = report.trace;
        tr.time_s.push_back(time);
        tr.offered.emplace_back(offered.begin(), offered.end());
        tr.received.emplace_back(network.received().begin(), network.received().end());
        tr.cum_loss.emplace_back(network.cumulative_loss().begin(), network.cumulative_loss().end());
        std::vector<double> om(nc), util(nc), fill(nc), q(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            const CircuitRuntime& rt = network.circuits()[c];
            const QueueTotals& qt = network.circuit_totals()[c];
            om[c] = rt.omega;
            util[c] = rt.service_rate() > 0.0 ? qt.transmitted / rt.service_rate() : 0.0;
            fill[c] = rt.queue_limit() > 0.0 ? qt.q_new / rt.queue_limit() : 0.0;
            q[c] = qt.q_new;
        }
        tr.omega.push_back(std::move(om));
        tr.utilization.push_back(std::move(util));
        tr.queue_fill.push_back(std::move(fill));
        tr.queue_gbit.push_back(std::move(q));
    };

    for (std::size_t k = 0; k < steps; ++k) {
        const double time = static_cast<double>(k) * T;
        traffic.advance_to(time);
        const auto offered = traffic.sample_instant_rates();
        if (hooks) hooks->on_step(k, time, network, offered);
        if (k == 0) {
            report.initial_omega.assign(network.omega().begin(), network.omega().end());
            for (ConfigId t : network.assignment()) report.initial_routes.push_back(std::to_string(t));
        }
        network.step(offered);
        for (std::size_t c = 0; c < nc; ++c) {
            const CircuitRuntime& rt = network.circuits()[c];
            if (rt.queue_limit() > 0.0)
                report.max_queue_fill[c] = std::max(report.max_queue_fill[c], network.circuit_totals()[c].q_new / rt.queue_limit());
        }
        if (options.trace_every > 0 && (k % options.trace_every == 0 || k + 1 == steps)) record(time, offered);
    }

    report.totals.steps = steps;
    report.totals.injected = network.injected();
    report.totals.delivered = network.delivered();
    report.totals.lost = network.lost();
    report.totals.residual_queue = network.residual_queue();
    report.totals.residual_transit = network.residual_transit();
    report.injected_per_demand.assign(network.injected_per_demand().begin(), network.injected_per_demand().end());
    report.delivered_per_demand.assign(network.delivered_per_demand().begin(), network.delivered_per_demand().end());
    report.lost_per_demand.assign(network.cumulative_loss().begin(), network.cumulative_loss().end());
    report.max_step_conservation_error = network.max_step_conservation_error();
    report.stranded_steps = network.stranded_steps();
    if (hooks) {
        report.events = hooks->events();
        report.reconfigurations = hooks->reconfigurations();
    }
    return report;
}

}  // namespace fatpipe
