#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fatpipe/anneal.hpp"
#include "fatpipe/bnb_solver.hpp"
#include "fatpipe/flowsim.hpp"
#include "fatpipe/optimizer.hpp"
#include "fatpipe/qubo.hpp"

namespace fatpipe {

struct ControllerTimings {
    double poll_interval = 0.035;          // s
    double telemetry_delay = 0.005;        // s
    double apply_delay = 0.030;            // s
    double reoccupation_interval = 0.100;  // s
    double allocation_interval = 0.0;      // s, 0 = only at t = 0
    double solver_latency = 0.0;           // s, added to apply_delay
};

enum class ControlMode { allocation_only, reoccupation };
enum class SolverBackend { exact, qubo_anneal };
/// Demand estimate fed to the allocation: the configured long-term means, or
/// the offered rates in the telemetry snapshot available at decision time.
enum class AllocationBasis { configured, snapshot };

const char* to_string(ControlMode m);
const char* to_string(SolverBackend b);
const char* to_string(AllocationBasis b);

struct ControllerConfig {
    ControllerTimings timings;
    ControlMode mode = ControlMode::reoccupation;
    double pi = 1.1;
    double xi = 100.0;
    std::vector<int> eta;       // per node
    std::vector<double> h_avg;  // per demand, used with AllocationBasis::configured
    AllocationBasis allocation_basis = AllocationBasis::configured;
    QueueNormalization normalization = QueueNormalization::per_circuit;
    /// Keep the current configuration of a demand when rerouting gains nothing.
    bool sticky = false;
    /// Backend for reoccupation decisions; allocation is always solved exactly.
    SolverBackend backend = SolverBackend::exact;
    AnnealConfig anneal;
    QuboOptions qubo;
    SolverOptions solver;
};

/// Point-in-time copy of network state as seen by the controller.
struct TelemetrySnapshot {
    std::size_t capture_step = 0;
    std::size_t delivery_step = 0;
    std::vector<double> h;  // offered rate per demand
    std::vector<double> q;  // backlog per circuit, Gbit
    std::vector<int> omega;
    std::vector<ConfigId> assignment;
};

/// Timer-driven controller: periodic polls with delayed delivery, an allocation
/// at t = 0 (optionally repeated), reoccupation on a fixed grid, and delayed
/// roll-out of every decision after t = 0. All timings are rounded to whole steps.
///
/// Within one step: due activations, the t = 0 allocation, the poll, then
/// decisions. Decisions read only the newest delivered snapshot; before the
/// first delivery they read the t = 0 snapshot, which counts as known a priori.
class SdnController : public ControlHooks {
public:
    SdnController(const ConfigurationCatalog& catalog, ControllerConfig config, double t_sim);

    void on_step(std::size_t step, double time_s, FlowNetwork& network, std::span<const double> offered) override;
    std::vector<EventRecord> events() const override { return events_; }
    std::size_t reconfigurations() const override { return reconfigurations_; }

    std::size_t poll_steps() const { return poll_steps_; }
    std::size_t telemetry_steps() const { return telemetry_steps_; }
    std::size_t apply_steps() const { return apply_steps_; }
    std::size_t reoccupation_steps() const { return reoccupation_steps_; }

    const std::vector<int>& committed_omega() const { return omega_; }
    const std::vector<ConfigId>& committed_assignment() const { return assignment_; }

private:
    struct Pending {
        std::size_t decided = 0;
        std::size_t activation = 0;
        std::vector<ConfigId> assignment;
        std::vector<int> omega;  // empty for reoccupation
    };

    const TelemetrySnapshot& usable_snapshot(std::size_t step) const;
    AllocationResult allocate(const TelemetrySnapshot& snap);
    std::optional<ReoccupationResult> reoccupy(const TelemetrySnapshot& snap, std::size_t step, std::string& why);
    void activate(Pending& p, FlowNetwork& network, double time_s, std::size_t step, const char* what);
    void log(double time_s, std::size_t step, std::string kind, std::string detail, long snapshot = -1,
             long activation = -1);
    std::string describe_changes(const std::vector<ConfigId>& from, const std::vector<ConfigId>& to) const;

    const ConfigurationCatalog* catalog_;
    ControllerConfig config_;
    double t_sim_;
    std::size_t poll_steps_, telemetry_steps_, apply_steps_, reoccupation_steps_, allocation_steps_;

    std::vector<TelemetrySnapshot> snapshots_;  // in capture order
    std::optional<Pending> pending_allocation_;
    std::optional<Pending> pending_reoccupation_;
    std::vector<int> omega_;
    std::vector<ConfigId> assignment_;

    std::vector<EventRecord> events_;
    std::size_t reconfigurations_ = 0;
};

}  // namespace fatpipe
