#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fatpipe {

struct EventRecord {
    double time_s = 0.0;
    std::size_t step = 0;
    std::string kind;  // poll, allocation, reoccupation, activate, reoccupation_infeasible, superseded
    std::string detail;
    long snapshot_step = -1;    // step of the telemetry used by a decision
    long activation_step = -1;  // step at which a decision takes effect
};

/// Decimated per-step series. Rows are samples, columns demands or circuits.
struct TraceSeries {
    std::vector<double> time_s;
    std::vector<std::vector<double>> offered;      // Gbit/s
    std::vector<std::vector<double>> received;     // Gbit/s
    std::vector<std::vector<double>> cum_loss;     // Gbit
    std::vector<std::vector<double>> omega;
    std::vector<std::vector<double>> utilization;  // b_c / mu_c
    std::vector<std::vector<double>> queue_fill;   // q_c / q_limit
    std::vector<std::vector<double>> queue_gbit;
};

struct RunTotals {
    std::size_t steps = 0;
    double injected = 0.0;  // Gbit
    double delivered = 0.0;
    double lost = 0.0;
    double residual_queue = 0.0;
    double residual_transit = 0.0;

    double relative_loss() const { return injected > 0.0 ? lost / injected : 0.0; }
    /// |injected - delivered - lost - residuals| / injected.
    double conservation_error() const;
};

struct RunReport {
    std::string scenario;
    std::string mode;
    std::uint64_t seed = 0;
    double t_sim = 0.0;
    double duration_s = 0.0;

    std::vector<std::string> demand_labels;
    std::vector<std::string> circuit_labels;

    TraceSeries trace;
    RunTotals totals;
    std::vector<double> injected_per_demand;
    std::vector<double> delivered_per_demand;
    std::vector<double> lost_per_demand;
    std::vector<double> max_queue_fill;  // per circuit, over the whole run
    std::vector<int> initial_omega;      // per circuit, after the t = 0 allocation
    std::vector<std::string> initial_routes;  // per demand

    double max_step_conservation_error = 0.0;
    std::size_t stranded_steps = 0;
    std::size_t reconfigurations = 0;
    std::vector<EventRecord> events;

    std::size_t active_circuits() const;
};

/// Numbers in CSV and summaries use printf "%.9g".
std::string format_number(double v);

// Long-format CSV traces.
//   demands.csv:  time_s,demand,offered_gbps,received_gbps,cum_loss_gbit
//   circuits.csv: time_s,circuit,omega,utilization,queue_fill,queue_gbit
//   events.csv:   time_s,step,kind,snapshot_step,activation_step,detail
void write_demand_trace(std::ostream& os, const RunReport& report);
void write_circuit_trace(std::ostream& os, const RunReport& report);
void write_events(std::ostream& os, const RunReport& report);

/// Parses a demands.csv / circuits.csv back into the trace of a report whose
/// labels are already set. Throws ValidationError on malformed input.
void read_demand_trace(std::istream& is, RunReport& report);
void read_circuit_trace(std::istream& is, RunReport& report);

std::string summary_text(const RunReport& report);
std::string summary_json(const RunReport& report);

/// Writes demands.csv, circuits.csv, events.csv, summary.txt, summary.json into dir.
void write_run_files(const std::string& dir, const RunReport& report);

struct ComparisonRow {
    std::uint64_t seed = 0;
    double loss_allocation = 0.0;   // Gbit
    double loss_reoccupation = 0.0;
    double injected = 0.0;
    std::size_t reconfigurations = 0;
};

struct Comparison {
    std::string scenario;
    std::vector<ComparisonRow> rows;
    double mean_loss_allocation() const;
    double mean_loss_reoccupation() const;
    /// mean reoccupation loss / mean allocation loss (0 if allocation loss is 0).
    double loss_ratio() const;
};

std::string comparison_text(const Comparison& c);
std::string comparison_json(const Comparison& c);

}  // namespace fatpipe
