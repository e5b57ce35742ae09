// Command line front end: run, compare, validate, export-ilp, export-qubo.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fatpipe/errors.hpp"
#include "fatpipe/optimizer.hpp"
#include "fatpipe/qubo.hpp"
#include "fatpipe/runner.hpp"
#include "fatpipe/scenario.hpp"

namespace {

using namespace fatpipe;

enum Exit { kOk = 0, kOther = 1, kValidation = 2, kInfeasible = 3, kSolverLimit = 4 };

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

// Model for export: allocation from the configured means, reoccupation from
// that allocation with offered rates at their means and empty queues.
IlpProblem export_problem(const ScenarioSpec& spec, const ScenarioModel& model, const std::string& kind)
{
    std::vector<double> h;
    for (const auto& d : model.catalog.demands()) h.push_back(d.h_avg);
    if (kind == "allocation") return build_allocation_ilp(model.catalog, h, spec.pi, spec.flow.xi, model.eta).problem;
    SolverOptions so;
    so.node_budget = spec.node_budget;
    const AllocationResult alloc = solve_allocation(model.catalog, h, spec.pi, spec.flow.xi, model.eta, so);
    const std::vector<double> q(model.catalog.circuits().size(), 0.0);
    ReoccupationInput in;
    in.h_now = h;
    in.w = alloc.w;
    in.q = q;
    in.delta_t = spec.timings.reoccupation_interval;
    in.xi = spec.flow.xi;
    in.normalization = spec.normalization;
    return build_reoccupation_ilp(model.catalog, in).problem;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Flow simulator for buffered optical fat-pipe networks"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, mode, kind = "allocation", out_file, modes = "allocation,reoccupation";
    std::uint64_t seed = 0, first_seed = 1;
    double duration = 0.0;
    std::size_t trace_every = 0, seeds = 20;
    bool have_seed = false, serial = false;

    auto* run = app.add_subcommand("run", "Run one scenario and write traces and summaries");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("-o,--out", out_dir, "Output directory")->default_val("out");
    run->add_option("--mode", mode, "allocation | reoccupation (overrides the scenario)");
    run->add_option("--seed", seed, "Traffic seed (overrides the scenario)")->each([&](const std::string&) { have_seed = true; });
    run->add_option("--duration", duration, "Horizon in seconds (overrides the scenario)");
    run->add_option("--trace-every", trace_every, "Record every n-th step (overrides the scenario)");

    auto* cmp = app.add_subcommand("compare", "Run several seeds in several control modes");
    cmp->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    cmp->add_option("--modes", modes, "Comma separated modes")->default_val("allocation,reoccupation");
    cmp->add_option("--seeds", seeds, "Number of seeds")->default_val(20);
    cmp->add_option("--first-seed", first_seed, "First seed")->default_val(1);
    cmp->add_option("-o,--out", out_dir, "Directory for comparison.txt / comparison.json");
    cmp->add_flag("--serial", serial, "Run replicas one after another");

    auto* val = app.add_subcommand("validate", "Check a scenario file");
    val->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    auto* eilp = app.add_subcommand("export-ilp", "Dump an ILP in LP-style text");
    eilp->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    eilp->add_option("--kind", kind, "allocation | reoccupation")->default_val("allocation");
    eilp->add_option("-o,--out", out_file, "Output file, - for stdout")->default_val("-");

    auto* equbo = app.add_subcommand("export-qubo", "Dump the QUBO of an ILP as sparse triples");
    equbo->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    equbo->add_option("--kind", kind, "allocation | reoccupation")->default_val("reoccupation");
    equbo->add_option("-o,--out", out_file, "Output file, - for stdout")->default_val("-");

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioSpec spec = parse_scenario_file(scenario_path);

        if (*val) {
            const ScenarioModel model = build_model(spec);
            std::cout << "ok: " << model.topology.node_count() << " nodes, " << model.catalog.circuits().size()
                      << " circuit paths, " << model.catalog.demands().size() << " demands, "
                      << model.catalog.configurations().size() << " configurations\n";
            return kOk;
        }
        if (*eilp || *equbo) {
            if (kind != "allocation" && kind != "reoccupation")
                throw ValidationError({"--kind: expected allocation or reoccupation"});
            const ScenarioModel model = build_model(spec);
            const IlpProblem problem = export_problem(spec, model, kind);
            if (*eilp) {
                write_text(out_file, problem.to_lp_text());
            } else {
                QuboOptions qo;
                if (kind == "reoccupation") {
                    const double unit = spec.normalization == QueueNormalization::per_circuit_seconds ? spec.flow.xi : 1.0;
                    qo.resolution = spec.flow.xi * spec.timings.reoccupation_interval / unit / 256.0;
                }
                const QuboModel qm = ilp_to_qubo(problem, qo);
                std::ostringstream os;
                qm.qubo.write(os);
                write_text(out_file, os.str());
            }
            return kOk;
        }
        if (*run) {
            if (!mode.empty()) {
                if (mode == "allocation") spec.mode = ControlMode::allocation_only;
                else if (mode == "reoccupation") spec.mode = ControlMode::reoccupation;
                else throw ValidationError({"--mode: unknown mode '" + mode + "'"});
            }
            if (have_seed) spec.seed = seed;
            if (duration > 0.0) spec.duration_s = duration;
            if (trace_every > 0) spec.trace_every = trace_every;
            const RunReport report = run_scenario(spec);
            write_run_files(out_dir, report);
            std::cout << summary_text(report);
            return kOk;
        }
        if (*cmp) {
            const auto list = split(modes, ',');
            if (list != std::vector<std::string>{"allocation", "reoccupation"} &&
                list != std::vector<std::string>{"reoccupation", "allocation"})
                throw ValidationError({"--modes: expected allocation,reoccupation"});
            if (seeds == 0) throw ValidationError({"--seeds: must be at least 1"});
            std::vector<std::uint64_t> seed_list;
            for (std::size_t i = 0; i < seeds; ++i) seed_list.push_back(first_seed + i);
            const ScenarioModel model = build_model(spec);
            const Comparison c = compare_modes(spec, model, seed_list, !serial);
            std::cout << comparison_text(c);
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                write_text(out_dir + "/comparison.txt", comparison_text(c));
                write_text(out_dir + "/comparison.json", comparison_json(c));
            }
            return kOk;
        }
    } catch (const ValidationError& e) {
        for (const auto& issue : e.issues()) std::cerr << "error: " << issue << '\n';
        return kValidation;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const SolverLimitError& e) {
        std::cerr << "solver limit: " << e.what() << '\n';
        return kSolverLimit;
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
