#include "fatpipe/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fatpipe/errors.hpp"

namespace fatpipe {

using ordered_json = nlohmann::ordered_json;

double RunTotals::conservation_error() const
{
    if (injected <= 0.0) return 0.0;
    return std::fabs(injected - delivered - lost - residual_queue - residual_transit) / injected;
}

std::size_t RunReport::active_circuits() const
{
    std::size_t n = 0;
    for (int w : initial_omega)
        if (w > 0) ++n;
    return n;
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

// Labels like [N2,N1] contain commas; quote them.
std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (char ch : line) {
        if (ch == '"') in_quotes = !in_quotes;
        else if (ch == ',' && !in_quotes) {
            out.push_back(cur);
            cur.clear();
        } else cur += ch;
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, const std::string& where)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError({where + ": not a number '" + s + "'"});
    }
}

std::size_t label_index(const std::vector<std::string>& labels, const std::string& s, const std::string& where)
{
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == s) return i;
    throw ValidationError({where + ": unknown label '" + s + "'"});
}

// Shared long-format reader: rows of (time, label, values...).
void read_long(std::istream& is, const std::vector<std::string>& labels, std::size_t value_count,
               const std::string& what, std::vector<double>& times,
               std::vector<std::vector<std::vector<double>>*> series)
{
    std::string line;
    if (!std::getline(is, line)) throw ValidationError({what + ": empty file"});
    times.clear();
    for (auto* s : series) s->clear();
    std::size_t line_no = 1;
    std::size_t row_in_sample = labels.size();
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = what + ":" + std::to_string(line_no);
        const auto cells = split_csv(line);
        if (cells.size() != 2 + value_count) throw ValidationError({where + ": expected " + std::to_string(2 + value_count) + " columns"});
        const double t = parse_number(cells[0], where);
        const std::size_t idx = label_index(labels, cells[1], where);
        if (row_in_sample == labels.size()) {
            times.push_back(t);
            for (auto* s : series) s->emplace_back(labels.size(), 0.0);
            row_in_sample = 0;
        }
        if (idx != row_in_sample) throw ValidationError({where + ": rows out of order"});
        for (std::size_t v = 0; v < value_count; ++v) series[v]->back()[idx] = parse_number(cells[2 + v], where);
        ++row_in_sample;
    }
    if (row_in_sample != labels.size()) throw ValidationError({what + ": truncated sample"});
}

}  // namespace

void write_demand_trace(std::ostream& os, const RunReport& r)
{
    os << "time_s,demand,offered_gbps,received_gbps,cum_loss_gbit\n";
    const auto& tr = r.trace;
    for (std::size_t s = 0; s < tr.time_s.size(); ++s) {
        for (std::size_t d = 0; d < r.demand_labels.size(); ++d) {
            os << format_number(tr.time_s[s]) << ',' << quoted(r.demand_labels[d]) << ','
               << format_number(tr.offered[s][d]) << ',' << format_number(tr.received[s][d]) << ','
               << format_number(tr.cum_loss[s][d]) << '\n';
        }
    }
}

void write_circuit_trace(std::ostream& os, const RunReport& r)
{
    os << "time_s,circuit,omega,utilization,queue_fill,queue_gbit\n";
    const auto& tr = r.trace;
    for (std::size_t s = 0; s < tr.time_s.size(); ++s) {
        for (std::size_t c = 0; c < r.circuit_labels.size(); ++c) {
            os << format_number(tr.time_s[s]) << ',' << quoted(r.circuit_labels[c]) << ','
               << format_number(tr.omega[s][c]) << ',' << format_number(tr.utilization[s][c]) << ','
               << format_number(tr.queue_fill[s][c]) << ',' << format_number(tr.queue_gbit[s][c]) << '\n';
        }
    }
}

void write_events(std::ostream& os, const RunReport& r)
{
    os << "time_s,step,kind,snapshot_step,activation_step,detail\n";
    for (const auto& e : r.events) {
        std::string detail = e.detail;
        for (char& ch : detail)
            if (ch == '"') ch = '\'';
        os << format_number(e.time_s) << ',' << e.step << ',' << e.kind << ',' << e.snapshot_step << ','
           << e.activation_step << ',' << quoted(detail) << '\n';
    }
}

void read_demand_trace(std::istream& is, RunReport& r)
{
    auto& tr = r.trace;
    read_long(is, r.demand_labels, 3, "demands.csv", tr.time_s, {&tr.offered, &tr.received, &tr.cum_loss});
}

void read_circuit_trace(std::istream& is, RunReport& r)
{
    auto& tr = r.trace;
    read_long(is, r.circuit_labels, 4, "circuits.csv", tr.time_s,
              {&tr.omega, &tr.utilization, &tr.queue_fill, &tr.queue_gbit});
}

std::string summary_text(const RunReport& r)
{
    std::ostringstream os;
    const auto& t = r.totals;
    os << "scenario            " << r.scenario << '\n'
       << "mode                " << r.mode << '\n'
       << "seed                " << r.seed << '\n'
       << "steps               " << t.steps << '\n'
       << "t_sim_s             " << format_number(r.t_sim) << '\n'
       << "injected_gbit       " << format_number(t.injected) << '\n'
       << "delivered_gbit      " << format_number(t.delivered) << '\n'
       << "lost_gbit           " << format_number(t.lost) << '\n'
       << "in_queues_gbit      " << format_number(t.residual_queue) << '\n'
       << "in_transit_gbit     " << format_number(t.residual_transit) << '\n'
       << "relative_loss       " << format_number(t.relative_loss()) << '\n'
       << "conservation_error  " << format_number(t.conservation_error()) << '\n'
       << "max_step_error      " << format_number(r.max_step_conservation_error) << '\n'
       << "active_circuits     " << r.active_circuits() << " of " << r.circuit_labels.size() << '\n'
       << "reconfigurations    " << r.reconfigurations << '\n'
       << "stranded_steps      " << r.stranded_steps << '\n';
    os << "\ndemand              injected_gbit  delivered_gbit  lost_gbit  initial_route\n";
    for (std::size_t d = 0; d < r.demand_labels.size(); ++d) {
        char line[256];
        std::snprintf(line, sizeof line, "%-18s  %13s  %14s  %9s  %s\n", r.demand_labels[d].c_str(),
                      format_number(r.injected_per_demand[d]).c_str(),
                      format_number(r.delivered_per_demand[d]).c_str(), format_number(r.lost_per_demand[d]).c_str(),
                      d < r.initial_routes.size() ? r.initial_routes[d].c_str() : "");
        os << line;
    }
    os << "\ncircuit             omega  max_queue_fill\n";
    for (std::size_t c = 0; c < r.circuit_labels.size(); ++c) {
        char line[256];
        std::snprintf(line, sizeof line, "%-18s  %5d  %s\n", r.circuit_labels[c].c_str(),
                      c < r.initial_omega.size() ? r.initial_omega[c] : 0, format_number(r.max_queue_fill[c]).c_str());
        os << line;
    }
    return os.str();
}

std::string summary_json(const RunReport& r)
{
    ordered_json j;
    j["scenario"] = r.scenario;
    j["mode"] = r.mode;
    j["seed"] = r.seed;
    j["steps"] = r.totals.steps;
    j["t_sim_s"] = r.t_sim;
    j["duration_s"] = r.duration_s;
    j["injected_gbit"] = r.totals.injected;
    j["delivered_gbit"] = r.totals.delivered;
    j["lost_gbit"] = r.totals.lost;
    j["in_queues_gbit"] = r.totals.residual_queue;
    j["in_transit_gbit"] = r.totals.residual_transit;
    j["relative_loss"] = r.totals.relative_loss();
    j["conservation_error"] = r.totals.conservation_error();
    j["max_step_conservation_error"] = r.max_step_conservation_error;
    j["active_circuits"] = r.active_circuits();
    j["reconfigurations"] = r.reconfigurations;
    j["stranded_steps"] = r.stranded_steps;
    ordered_json demands = ordered_json::array();
    for (std::size_t d = 0; d < r.demand_labels.size(); ++d) {
        demands.push_back({{"demand", r.demand_labels[d]},
                           {"injected_gbit", r.injected_per_demand[d]},
                           {"delivered_gbit", r.delivered_per_demand[d]},
                           {"lost_gbit", r.lost_per_demand[d]},
                           {"initial_route", d < r.initial_routes.size() ? r.initial_routes[d] : ""}});
    }
    j["demands"] = demands;
    ordered_json circuits = ordered_json::array();
    for (std::size_t c = 0; c < r.circuit_labels.size(); ++c) {
        circuits.push_back({{"circuit", r.circuit_labels[c]},
                            {"omega", c < r.initial_omega.size() ? r.initial_omega[c] : 0},
                            {"max_queue_fill", r.max_queue_fill[c]}});
    }
    j["circuits"] = circuits;
    return j.dump(2) + "\n";
}

void write_run_files(const std::string& dir, const RunReport& r)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        return f;
    };
    {
        auto f = open("demands.csv");
        write_demand_trace(f, r);
    }
    {
        auto f = open("circuits.csv");
        write_circuit_trace(f, r);
    }
    {
        auto f = open("events.csv");
        write_events(f, r);
    }
    open("summary.txt") << summary_text(r);
    open("summary.json") << summary_json(r);
}

double Comparison::mean_loss_allocation() const
{
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& row : rows) s += row.loss_allocation;
    return s / static_cast<double>(rows.size());
}

double Comparison::mean_loss_reoccupation() const
{
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& row : rows) s += row.loss_reoccupation;
    return s / static_cast<double>(rows.size());
}

double Comparison::loss_ratio() const
{
    const double a = mean_loss_allocation();
    return a > 0.0 ? mean_loss_reoccupation() / a : 0.0;
}

std::string comparison_text(const Comparison& c)
{
    std::ostringstream os;
    os << "scenario " << c.scenario << '\n';
    os << "seed        injected_gbit  loss_allocation_gbit  loss_reoccupation_gbit  reconfigurations\n";
    for (const auto& row : c.rows) {
        char line[256];
        std::snprintf(line, sizeof line, "%-10llu  %13s  %20s  %22s  %16zu\n",
                      static_cast<unsigned long long>(row.seed), format_number(row.injected).c_str(),
                      format_number(row.loss_allocation).c_str(), format_number(row.loss_reoccupation).c_str(),
                      row.reconfigurations);
        os << line;
    }
    os << "mean_loss_allocation_gbit    " << format_number(c.mean_loss_allocation()) << '\n'
       << "mean_loss_reoccupation_gbit  " << format_number(c.mean_loss_reoccupation()) << '\n'
       << "loss_ratio                   " << format_number(c.loss_ratio()) << '\n';
    return os.str();
}

std::string comparison_json(const Comparison& c)
{
    ordered_json j;
    j["scenario"] = c.scenario;
    ordered_json rows = ordered_json::array();
    for (const auto& row : c.rows) {
        rows.push_back({{"seed", row.seed},
                        {"injected_gbit", row.injected},
                        {"loss_allocation_gbit", row.loss_allocation},
                        {"loss_reoccupation_gbit", row.loss_reoccupation},
                        {"reconfigurations", row.reconfigurations}});
    }
    j["runs"] = rows;
    j["mean_loss_allocation_gbit"] = c.mean_loss_allocation();
    j["mean_loss_reoccupation_gbit"] = c.mean_loss_reoccupation();
    j["loss_ratio"] = c.loss_ratio();
    return j.dump(2) + "\n";
}

}  // namespace fatpipe
