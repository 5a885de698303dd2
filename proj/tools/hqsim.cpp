// hqsim: discrete-event simulator for hybrid HPC-quantum cluster scheduling.
//
// Subcommands:
//   simulate        run one strategy on a scenario config
//   compare         run several strategies on the identical workload
//   paper-scenario  run all strategies on a canonical imbalance scenario
//   parse           parse a hetjob batch script and print its components
//
// Exit codes: 0 ok, 1 config error, 2 validation/parse error, 3 simulation fault.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqsim/config.hpp"
#include "hqsim/hetjob.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/simulation.hpp"
#include "hqsim/workload.hpp"

namespace {

using namespace hqsim;
using nlohmann::json;

constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;
constexpr int kExitFault = 3;

void emit_error(const std::string& category, const std::string& message) {
    json err;
    err["error"] = category;
    err["message"] = message;
    std::cerr << err.dump() << "\n";
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

json summary_json(const std::string& strategy, const MetricsReport& r) {
    json j;
    j["strategy"] = strategy;
    j["qpu_utilization"] = r.qpu_utilization_allocated;
    j["qpu_utilization_window"] = r.qpu_utilization_window;
    j["node_utilization"] = r.node_utilization;
    j["node_idle_allocated"] = r.node_idle_allocated;
    j["node_idle_allocated_fraction"] = r.node_idle_allocated_fraction;
    j["makespan"] = r.makespan;
    j["mean_wait"] = r.mean_wait;
    j["max_wait"] = r.max_wait;
    return j;
}

void print_summary_table(const std::vector<std::pair<std::string, MetricsReport>>& rows,
                         const std::string& imbalance = "") {
    std::printf("%-12s %14s %14s %16s %12s %10s\n", "strategy", "qpu_util(alloc)",
                "node_util", "node_idle(n*s)", "makespan", "mean_wait");
    for (const auto& [name, r] : rows)
        std::printf("%-12s %14s %14s %16s %12s %10s\n", name.c_str(),
                    fmt(r.qpu_utilization_allocated).c_str(), fmt(r.node_utilization).c_str(),
                    fmt(r.node_idle_allocated).c_str(), fmt(r.makespan).c_str(),
                    fmt(r.mean_wait).c_str());
    if (!imbalance.empty()) std::printf("workload imbalance: %s\n", imbalance.c_str());
}

struct RunOutput {
    Trace trace;
    MetricsReport report;
};

// validate + simulate + analyze for one strategy
RunOutput run_one(const ScenarioConfig& cfg, const std::vector<JobSpec>& jobs,
                  StrategyKind strategy) {
    for (const auto& job : jobs) {
        const auto check =
            validate_job(job, cfg.cluster, strategy == StrategyKind::Vqpu);
        if (!check.ok())
            throw std::invalid_argument("job '" + job.job_id + "': " + check.reason);
    }
    SimResult sim = simulate(cfg.cluster, jobs, strategy, cfg.params, cfg.seed);
    if (sim.fault) throw std::runtime_error("simulation fault: " + sim.fault_reason);
    RunOutput out;
    out.report = analyze(sim.trace, cfg.cluster);
    out.trace = std::move(sim.trace);
    return out;
}

void write_run_outputs(const ScenarioConfig& cfg, const std::string& strategy,
                       const RunOutput& run) {
    if (cfg.output.directory.empty()) return;
    std::filesystem::create_directories(cfg.output.directory);
    const std::filesystem::path dir(cfg.output.directory);
    write_file(dir / ("jobs-" + strategy + ".csv"), jobs_csv(strategy, run.report));
    write_file(dir / ("summary-" + strategy + ".csv"),
               summary_csv_header() + summary_csv_row(strategy, run.report));
    if (cfg.output.trace)
        write_file(dir / ("trace-" + strategy + ".tsv"), dump_trace(run.trace));
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides) {
    ScenarioConfig cfg;
    std::vector<JobSpec> jobs;
    try {
        cfg = load_scenario(config_path, overrides);
        jobs = build_workload(cfg);
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return kExitConfig;
    }
    RunOutput run;
    const std::string name = to_string(cfg.strategy);
    try {
        run = run_one(cfg, jobs, cfg.strategy);
    } catch (const std::invalid_argument& e) {
        emit_error("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        emit_error("fault", e.what());
        return kExitFault;
    }
    write_run_outputs(cfg, name, run);
    if (cfg.output.format == "json")
        std::cout << summary_json(name, run.report).dump(2) << "\n";
    else
        print_summary_table({{name, run.report}});
    return 0;
}

int cmd_compare(const std::string& config_path, std::vector<std::string> strategies,
                const std::vector<std::string>& overrides) {
    if (strategies.size() < 2) {
        emit_error("config", "compare requires at least two strategy names");
        return kExitConfig;
    }
    ScenarioConfig cfg;
    std::vector<JobSpec> jobs;
    std::vector<StrategyKind> kinds;
    try {
        cfg = load_scenario(config_path, overrides);
        jobs = build_workload(cfg);
        for (const auto& name : strategies) {
            const auto kind = strategy_from_name(name);
            if (!kind) {
                std::string valid;
                for (const auto& n : strategy_names()) valid += n + " ";
                throw ConfigError("unknown strategy '" + name + "' (valid: " + valid + ")");
            }
            kinds.push_back(*kind);
        }
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return kExitConfig;
    }

    std::vector<std::pair<std::string, MetricsReport>> reports;
    try {
        for (size_t i = 0; i < kinds.size(); ++i) {
            RunOutput run = run_one(cfg, jobs, kinds[i]);
            write_run_outputs(cfg, strategies[i], run);
            reports.emplace_back(strategies[i], std::move(run.report));
        }
    } catch (const std::invalid_argument& e) {
        emit_error("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        emit_error("fault", e.what());
        return kExitFault;
    }

    const ComparisonTable table = compare(reports);
    if (!cfg.output.directory.empty()) {
        std::ostringstream csv;
        csv << "strategy,qpu_utilization,node_utilization,node_idle_allocated,makespan,"
               "mean_wait,max_wait,d_qpu_utilization,d_node_utilization,d_makespan\n";
        for (const auto& row : table.rows) {
            std::string base = summary_csv_row(row.strategy, row.report);
            base.pop_back(); // trailing newline
            char buf[128];
            std::snprintf(buf, sizeof(buf), ",%.10g,%.10g,%.10g\n", row.d_qpu_utilization,
                          row.d_node_utilization, row.d_makespan);
            csv << base << buf;
        }
        std::filesystem::create_directories(cfg.output.directory);
        write_file(std::filesystem::path(cfg.output.directory) / "comparison.csv",
                   csv.str());
    }
    if (cfg.output.format == "json") {
        json j;
        j["imbalance"] = table.imbalance;
        j["rows"] = json::array();
        for (const auto& row : table.rows) j["rows"].push_back(summary_json(row.strategy, row.report));
        std::cout << j.dump(2) << "\n";
    } else {
        print_summary_table(reports, table.imbalance);
    }
    return 0;
}

int cmd_paper_scenario(const std::string& tech, const std::string& out_dir,
                       const std::string& format, bool trace) {
    std::pair<ClusterConfig, std::vector<JobSpec>> scenario;
    try {
        scenario = paper_scenario(tech);
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return kExitConfig;
    }
    ScenarioConfig cfg;
    cfg.cluster = scenario.first;
    cfg.output.directory = out_dir;
    cfg.output.format = format;
    cfg.output.trace = trace;

    std::vector<std::pair<std::string, MetricsReport>> reports;
    try {
        for (const auto& name : strategy_names()) {
            RunOutput run = run_one(cfg, scenario.second, *strategy_from_name(name));
            write_run_outputs(cfg, name, run);
            reports.emplace_back(name, std::move(run.report));
        }
    } catch (const std::exception& e) {
        emit_error("fault", e.what());
        return kExitFault;
    }

    const ComparisonTable table = compare(reports);
    if (format == "json") {
        json j;
        j["technology"] = tech;
        j["imbalance"] = table.imbalance;
        j["rows"] = json::array();
        for (const auto& row : table.rows) j["rows"].push_back(summary_json(row.strategy, row.report));
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    const MetricsReport& cos = reports.front().second;
    std::printf("canonical scenario: %s (10 nodes, 1 QPU, 1 h walltimes)\n", tech.c_str());
    if (tech == "superconducting")
        std::printf("coschedule QPU utilization (busy/allocated): %s\n",
                    fmt(cos.qpu_utilization_allocated).c_str());
    else
        std::printf("coschedule classical allocated-idle fraction: %s\n",
                    fmt(cos.node_idle_allocated_fraction).c_str());
    print_summary_table(reports, table.imbalance);
    return 0;
}

int cmd_parse(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        emit_error("config", "cannot read file '" + path + "'");
        return kExitConfig;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const HetjobParse parsed = parse_hetjob(buf.str());
    if (!parsed.ok()) {
        std::cerr << format_errors(parsed, path);
        return kExitValidation;
    }
    json j = json::array();
    for (const auto& r : parsed.requests)
        j.push_back({{"component_id", r.component_id},
                     {"partition", r.partition},
                     {"nodes", r.nodes},
                     {"qpu_gres", r.qpu_gres},
                     {"walltime", r.walltime}});
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid HPC-quantum scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format, strategy_flag, tech, script_path;
    std::vector<std::string> sets, strategies;
    std::uint64_t seed = 0;
    bool trace = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config file")->required();
        cmd->add_option("--set", sets, "override config values (section.key=value)");
        cmd->add_option("--seed", seed, "override the scenario seed");
        cmd->add_option("--out", out_dir, "output directory for CSV/trace files");
        cmd->add_option("--format", format, "stdout format: csv (human) | json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--trace", trace, "dump the event trace");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one simulation");
    add_common(sim);
    sim->add_option("--strategy", strategy_flag, "strategy name override");

    CLI::App* cmp = app.add_subcommand("compare", "compare strategies on one workload");
    add_common(cmp);
    cmp->add_option("--strategies", strategies, "strategy names (>= 2)")
        ->delimiter(',');

    CLI::App* paper = app.add_subcommand("paper-scenario",
                                         "run all strategies on a canonical scenario");
    paper->add_option("tech", tech, "superconducting | neutral-atoms")->required();
    paper->add_option("--out", out_dir, "output directory");
    paper->add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    paper->add_flag("--trace", trace, "dump event traces");

    CLI::App* parse = app.add_subcommand("parse", "parse a hetjob batch script");
    parse->add_option("script", script_path, "script path")->required();

    CLI11_PARSE(app, argc, argv);

    // flag overrides become config overrides, applied after --set
    auto collect_overrides = [&](const CLI::App* cmd) {
        std::vector<std::string> overrides = sets;
        if (!strategy_flag.empty()) overrides.push_back("strategy.name=" + strategy_flag);
        if (cmd->count("--seed")) overrides.push_back("seed=" + std::to_string(seed));
        if (!out_dir.empty()) overrides.push_back("output.directory=" + out_dir);
        if (!format.empty()) overrides.push_back("output.format=" + format);
        if (trace) overrides.push_back("output.trace=true");
        return overrides;
    };

    if (sim->parsed()) return cmd_simulate(config_path, collect_overrides(sim));
    if (cmp->parsed()) return cmd_compare(config_path, strategies, collect_overrides(cmp));
    if (paper->parsed())
        return cmd_paper_scenario(tech, out_dir, format.empty() ? "csv" : format, trace);
    if (parse->parsed()) return cmd_parse(script_path);
    return 0;
}
