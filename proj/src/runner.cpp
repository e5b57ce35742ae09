#include "fatpipe/runner.hpp"

#include <exception>

#include "fatpipe/controller.hpp"
#include "fatpipe/flowsim.hpp"
#include "fatpipe/traffic.hpp"

namespace fatpipe {

RunReport run_scenario(const ScenarioSpec& spec, const ScenarioModel& model)
{
    FlowNetwork network(model.catalog, spec.flow, spec.kernel);
    TrafficGenerator traffic(spec.traffic, model.catalog.demands().size(), spec.seed);
    SdnController controller(model.catalog, controller_config(spec, model), spec.flow.t_sim);

    SimulationOptions options;
    options.duration_s = spec.duration_s;
    options.trace_every = spec.trace_every;
    RunReport report = simulate(network, traffic, &controller, options);

    report.scenario = spec.name;
    report.mode = to_string(spec.mode);
    report.seed = spec.seed;
    report.demand_labels = model.demand_labels;
    report.circuit_labels = model.circuit_labels;
    for (auto& route : report.initial_routes) route = model.config_labels.at(std::stoul(route));
    return report;
}

RunReport run_scenario(const ScenarioSpec& spec)
{
    const ScenarioModel model = build_model(spec);
    return run_scenario(spec, model);
}

Comparison compare_modes(const ScenarioSpec& spec, const ScenarioModel& model,
                         const std::vector<std::uint64_t>& seeds, bool parallel)
{
    const std::size_t jobs = 2 * seeds.size();
    std::vector<RunTotals> totals(jobs);
    std::vector<std::size_t> reconfigs(jobs, 0);
    std::vector<std::exception_ptr> errors(jobs);

    auto run_job = [&](std::size_t j) {
        try {
            ScenarioSpec s = spec;
            s.seed = seeds[j / 2];
            s.mode = j % 2 == 0 ? ControlMode::allocation_only : ControlMode::reoccupation;
            s.trace_every = 0;
            s.kernel = KernelMode::serial;  // parallelism is across replicas here
            const RunReport r = run_scenario(s, model);
            totals[j] = r.totals;
            reconfigs[j] = r.reconfigurations;
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };

    if (parallel) {
        const auto n = static_cast<long>(jobs);
#pragma omp parallel for schedule(dynamic, 1)
        for (long j = 0; j < n; ++j) run_job(static_cast<std::size_t>(j));
    } else {
        for (std::size_t j = 0; j < jobs; ++j) run_job(j);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Comparison c;
    c.scenario = spec.name;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        ComparisonRow row;
        row.seed = seeds[i];
        row.injected = totals[2 * i].injected;
        row.loss_allocation = totals[2 * i].lost;
        row.loss_reoccupation = totals[2 * i + 1].lost;
        row.reconfigurations = reconfigs[2 * i + 1];
        c.rows.push_back(row);
    }
    return c;
}

}  // namespace fatpipe
