#include "fatpipe/controller.hpp"

#include <cmath>
#include <sstream>

#include "fatpipe/errors.hpp"
#include "fatpipe/rng.hpp"

namespace fatpipe {

const char* to_string(ControlMode m)
{
    return m == ControlMode::allocation_only ? "allocation" : "reoccupation";
}

const char* to_string(SolverBackend b)
{
    return b == SolverBackend::exact ? "exact" : "qubo-anneal";
}

const char* to_string(AllocationBasis b)
{
    return b == AllocationBasis::configured ? "configured" : "snapshot";
}

namespace {

std::size_t to_steps(double seconds, double t_sim)
{
    return static_cast<std::size_t>(std::llround(seconds / t_sim));
}

}  // namespace

SdnController::SdnController(const ConfigurationCatalog& catalog, ControllerConfig config, double t_sim)
    : catalog_(&catalog), config_(std::move(config)), t_sim_(t_sim)
{
    const auto& tm = config_.timings;
    poll_steps_ = to_steps(tm.poll_interval, t_sim);
    telemetry_steps_ = to_steps(tm.telemetry_delay, t_sim);
    apply_steps_ = to_steps(tm.apply_delay + tm.solver_latency, t_sim);
    reoccupation_steps_ = to_steps(tm.reoccupation_interval, t_sim);
    allocation_steps_ = to_steps(tm.allocation_interval, t_sim);
    if (poll_steps_ == 0 || reoccupation_steps_ == 0)
        throw ConfigurationError("controller: poll and reoccupation intervals must span at least one step");
    if (config_.eta.size() != catalog.node_count())
        throw ConfigurationError("controller: transceiver counts do not match the node count");
    if (config_.allocation_basis == AllocationBasis::configured && config_.h_avg.size() != catalog.demands().size())
        throw ConfigurationError("controller: configured demand means do not match the demand count");
}

void SdnController::log(double time_s, std::size_t step, std::string kind, std::string detail, long snapshot,
                        long activation)
{
    events_.push_back({time_s, step, std::move(kind), std::move(detail), snapshot, activation});
}

std::string SdnController::describe_changes(const std::vector<ConfigId>& from, const std::vector<ConfigId>& to) const
{
    std::ostringstream os;
    std::size_t n = 0;
    for (DemandId d = 0; d < to.size(); ++d) {
        if (d < from.size() && from[d] == to[d]) continue;
        os << (n++ ? " " : "") << 'd' << d << "->t" << to[d];
    }
    return n ? os.str() : "no change";
}

const TelemetrySnapshot& SdnController::usable_snapshot(std::size_t step) const
{
    for (auto it = snapshots_.rbegin(); it != snapshots_.rend(); ++it)
        if (it->delivery_step <= step) return *it;
    return snapshots_.front();
}

AllocationResult SdnController::allocate(const TelemetrySnapshot& snap)
{
    const std::vector<double>& h = config_.allocation_basis == AllocationBasis::configured ? config_.h_avg : snap.h;
    return solve_allocation(*catalog_, h, config_.pi, config_.xi, config_.eta, config_.solver);
}

std::optional<ReoccupationResult> SdnController::reoccupy(const TelemetrySnapshot& snap, std::size_t step,
                                                          std::string& why)
{
    ReoccupationInput in;
    in.h_now = snap.h;
    in.w = omega_;
    in.q = snap.q;
    in.delta_t = config_.timings.reoccupation_interval;
    in.xi = config_.xi;
    in.normalization = config_.normalization;
    if (config_.sticky) in.current = assignment_;
    try {
        if (config_.backend == SolverBackend::exact) return solve_reoccupation(*catalog_, in, config_.solver);

        const ReoccupationModel model = build_reoccupation_ilp(*catalog_, in);
        QuboOptions qo = config_.qubo;
        if (qo.resolution <= 0.0) {
            const double unit = config_.normalization == QueueNormalization::per_circuit_seconds ? config_.xi : 1.0;
            qo.resolution = config_.xi * in.delta_t / unit / 256.0;
        }
        const QuboModel qm = ilp_to_qubo(model.problem, qo);
        AnnealConfig ac = config_.anneal;
        ac.seed = derive_seed(config_.anneal.seed, step);
        const AnnealResult ar = anneal(qm.qubo, ac);
        const DecodeResult dr = settle_continuous(model.problem, decode(model.problem, qm.encoding, ar.bits));
        if (!dr.feasible()) {
            why = "annealer returned a state violating " + std::to_string(dr.violations.size()) + " constraints";
            return std::nullopt;
        }
        return decode_reoccupation(*catalog_, model, dr.assignment);
    } catch (const InfeasibleError& e) {
        why = e.what();
        return std::nullopt;
    }
}

void SdnController::activate(Pending& p, FlowNetwork& network, double time_s, std::size_t step, const char* what)
{
    if (!p.omega.empty()) network.set_omega(p.omega);
    const std::vector<ConfigId> before(network.assignment().begin(), network.assignment().end());
    for (DemandId d = 0; d < p.assignment.size(); ++d) {
        for (CircuitId c : catalog_->configuration(p.assignment[d]).segments) {
            if (network.omega()[c] <= 0) {
                log(time_s, step, "superseded", std::string(what) + " routes over an inactive circuit", -1,
                    static_cast<long>(step));
                return;
            }
        }
    }
    network.set_assignment(p.assignment);
    if (before != p.assignment) ++reconfigurations_;
    log(time_s, step, "activate", std::string(what) + ": " + describe_changes(before, p.assignment),
        static_cast<long>(p.decided), static_cast<long>(step));
}

void SdnController::on_step(std::size_t step, double time_s, FlowNetwork& network, std::span<const double> offered)
{
    // 1) roll-outs due now
    if (pending_allocation_ && pending_allocation_->activation == step) {
        activate(*pending_allocation_, network, time_s, step, "allocation");
        pending_allocation_.reset();
    }
    if (pending_reoccupation_ && pending_reoccupation_->activation == step) {
        activate(*pending_reoccupation_, network, time_s, step, "reoccupation");
        pending_reoccupation_.reset();
    }

    // 2) initial allocation, applied at once
    if (step == 0) {
        TelemetrySnapshot initial;
        initial.h.assign(offered.begin(), offered.end());
        initial.q = network.queue_per_circuit();
        initial.omega.assign(network.omega().begin(), network.omega().end());
        initial.assignment.assign(network.assignment().begin(), network.assignment().end());
        const AllocationResult res = allocate(initial);
        omega_ = res.w;
        assignment_ = res.chosen;
        network.set_omega(omega_);
        network.set_assignment(assignment_);
        std::ostringstream os;
        os << "basis=" << to_string(config_.allocation_basis) << " circuits=" << res.objective;
        log(time_s, step, "allocation", os.str(), 0, 0);
    }

    // 3) telemetry
    if (step % poll_steps_ == 0) {
        TelemetrySnapshot snap;
        snap.capture_step = step;
        snap.delivery_step = step + telemetry_steps_;
        snap.h.assign(offered.begin(), offered.end());
        snap.q = network.queue_per_circuit();
        snap.omega.assign(network.omega().begin(), network.omega().end());
        snap.assignment.assign(network.assignment().begin(), network.assignment().end());
        snapshots_.push_back(std::move(snap));
        log(time_s, step, "poll", "delivery_step=" + std::to_string(step + telemetry_steps_),
            static_cast<long>(step), static_cast<long>(step + telemetry_steps_));
    }
    if (step == 0) return;

    // 4) decisions
    const std::size_t activation = step + apply_steps_;
    if (allocation_steps_ > 0 && step % allocation_steps_ == 0) {
        const TelemetrySnapshot& snap = usable_snapshot(step);
        const AllocationResult res = allocate(snap);
        pending_allocation_ = Pending{step, activation, res.chosen, res.w};
        pending_reoccupation_.reset();
        omega_ = res.w;
        const std::string changes = describe_changes(assignment_, res.chosen);
        assignment_ = res.chosen;
        std::ostringstream os;
        os << "basis=" << to_string(config_.allocation_basis) << " circuits=" << res.objective << " " << changes;
        log(time_s, step, "allocation", os.str(), static_cast<long>(snap.capture_step), static_cast<long>(activation));
        if (apply_steps_ == 0) {
            activate(*pending_allocation_, network, time_s, step, "allocation");
            pending_allocation_.reset();
        }
        return;
    }
    if (config_.mode != ControlMode::reoccupation || step % reoccupation_steps_ != 0) return;

    const TelemetrySnapshot& snap = usable_snapshot(step);
    std::string why;
    const auto res = reoccupy(snap, step, why);
    if (!res) {
        log(time_s, step, "reoccupation_infeasible", why, static_cast<long>(snap.capture_step), -1);
        return;
    }
    if (pending_reoccupation_) {
        log(time_s, step, "superseded", "pending decision of step " + std::to_string(pending_reoccupation_->decided),
            static_cast<long>(pending_reoccupation_->decided), static_cast<long>(pending_reoccupation_->activation));
    }
    std::ostringstream os;
    os << "q_max=" << format_number(res->q_max) << " " << describe_changes(assignment_, res->chosen);
    assignment_ = res->chosen;
    pending_reoccupation_ = Pending{step, activation, res->chosen, {}};
    log(time_s, step, "reoccupation", os.str(), static_cast<long>(snap.capture_step), static_cast<long>(activation));
    if (apply_steps_ == 0) {
        activate(*pending_reoccupation_, network, time_s, step, "reoccupation");
        pending_reoccupation_.reset();
    }
}

}  // namespace fatpipe
