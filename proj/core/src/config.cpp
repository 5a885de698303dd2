#include "hqsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hqsim/hetjob.hpp"

namespace hqsim {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// "section.key=value"; value parsed as JSON when possible, else as string
void apply_override(json& root, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + spec + "' is not of the form path=value");
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    json* node = &root;
    size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos
                                                     ? std::string::npos
                                                     : dot - pos);
        if (key.empty()) throw ConfigError("override '" + spec + "' has an empty key");
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

Dist dist_from_json(const json& j, const char* what) {
    if (j.is_number()) return Dist::fixed(j.get<double>());
    if (j.is_object()) {
        if (j.contains("fixed")) return Dist::fixed(j.at("fixed").get<double>());
        if (j.contains("uniform")) {
            const auto& u = j.at("uniform");
            if (!u.is_array() || u.size() != 2)
                throw ConfigError(std::string(what) + ": uniform needs [min, max]");
            return Dist::uniform(u[0].get<double>(), u[1].get<double>());
        }
    }
    throw ConfigError(std::string(what) + ": expected a number, {fixed}, or {uniform}");
}

QpuTechnologyProfile qpu_profile_from_json(const json& j) {
    const std::string tech = j.value("technology", "");
    QpuTechnologyProfile p =
        tech.empty() ? QpuTechnologyProfile{} : default_technology_profile(tech);
    if (j.contains("task_duration")) {
        const Dist d = dist_from_json(j.at("task_duration"), "cluster.qpus.task_duration");
        p.model = d.kind == Dist::Kind::Fixed ? DurationModel::Fixed : DurationModel::Uniform;
        p.min_s = d.a;
        p.max_s = d.b;
        if (p.name.empty()) p.name = "custom";
    }
    if (j.contains("calibration_overhead"))
        p.calibration_overhead_s = j.at("calibration_overhead").get<double>();
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
    if (p.name.empty()) throw ConfigError("cluster.qpus entry needs technology or name");
    return p;
}

} // namespace

ScenarioConfig scenario_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw ConfigError("config is not valid JSON");
    for (const auto& o : overrides) apply_override(root, o);

    ScenarioConfig cfg;
    try {
        // cluster
        const json& cl = root.at("cluster");
        cfg.cluster.classical_nodes = cl.at("classical_nodes").get<int>();
        cfg.cluster.vqpus_per_qpu = cl.value("vqpus_per_qpu", 1);
        for (const auto& qj : cl.at("qpus"))
            cfg.cluster.qpus.emplace_back(qpu_profile_from_json(qj), qj.value("count", 1));

        // workload: exactly one source
        const json& wl = root.at("workload");
        const int sources = int(wl.contains("profile")) + int(wl.contains("file")) +
                            int(wl.contains("hetjob"));
        if (sources != 1)
            throw ConfigError("workload must have exactly one of profile, file, hetjob");
        if (wl.contains("file")) {
            cfg.source = WorkloadSource::File;
            cfg.workload_path = wl.at("file").get<std::string>();
        } else if (wl.contains("hetjob")) {
            cfg.source = WorkloadSource::Hetjob;
            cfg.workload_path = wl.at("hetjob").get<std::string>();
        } else {
            cfg.source = WorkloadSource::Profile;
        }
        if (wl.contains("profile") || wl.contains("hetjob")) {
            // hetjob scripts carry no phase structure, so the pattern section
            // still applies to them
            const json& pj = wl.contains("profile") ? wl.at("profile")
                                                    : wl.value("pattern", json::object());
            cfg.profile.job_count = pj.value("job_count", 1);
            const json arrival = pj.value("arrival", json("all-at-zero"));
            if (arrival.is_string()) {
                const std::string a = arrival.get<std::string>();
                if (a == "all-at-zero") {
                    cfg.profile.arrival = ArrivalKind::AllAtZero;
                } else {
                    throw ConfigError("unknown arrival kind '" + a + "'");
                }
            } else {
                const std::string a = arrival.at("kind").get<std::string>();
                if (a == "poisson") {
                    cfg.profile.arrival = ArrivalKind::Poisson;
                    cfg.profile.rate_per_hour = arrival.at("rate_per_hour").get<double>();
                } else if (a == "all-at-zero") {
                    cfg.profile.arrival = ArrivalKind::AllAtZero;
                } else {
                    throw ConfigError("unknown arrival kind '" + a + "'");
                }
            }
            cfg.profile.nodes = pj.value("nodes", 1);
            cfg.profile.qpu_gres = pj.value("qpu_gres", 0);
            cfg.profile.walltime = pj.value("walltime", 3600.0);
            cfg.profile.technology = pj.value("technology", "superconducting");
            cfg.profile.seed = pj.value("seed", std::uint64_t{0});
            for (const auto& ph : pj.value("phases", json::array())) {
                PhaseTemplate t;
                const std::string kind = ph.at("kind").get<std::string>();
                if (kind == "classical") {
                    t.kind = PhaseKind::Classical;
                    t.classical_work = dist_from_json(ph.at("work"), "phase work");
                } else if (kind == "quantum") {
                    t.kind = PhaseKind::Quantum;
                    t.quantum_tasks = dist_from_json(ph.at("tasks"), "phase tasks");
                    if (ph.contains("prep"))
                        t.prep_time = dist_from_json(ph.at("prep"), "phase prep");
                } else {
                    throw ConfigError("unknown phase kind '" + kind + "'");
                }
                cfg.profile.phases.push_back(t);
            }
        }

        // strategy
        const json st = root.value("strategy", json::object());
        const std::string name = st.value("name", "coschedule");
        const auto kind = strategy_from_name(name);
        if (!kind)
            throw ConfigError("unknown strategy '" + name + "'");
        cfg.strategy = *kind;
        cfg.params.retain = st.value("retain", 1);
        cfg.params.backfill = st.value("backfill", false);
        if (cfg.params.retain < 1)
            throw ConfigError("strategy.retain must be >= 1");

        cfg.seed = root.value("seed", std::uint64_t{0});

        // output
        const json out = root.value("output", json::object());
        cfg.output.format = out.value("format", "csv");
        if (cfg.output.format != "csv" && cfg.output.format != "json")
            throw ConfigError("output.format must be csv or json");
        cfg.output.directory = out.value("directory", "");
        cfg.output.trace = out.value("trace", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    const ValidationResult cluster_check = validate_cluster(cfg.cluster);
    if (!cluster_check.ok()) throw ConfigError("cluster: " + cluster_check.reason);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides) {
    return scenario_from_json_text(read_file(path), overrides);
}

std::vector<JobSpec> build_workload(const ScenarioConfig& config) {
    switch (config.source) {
    case WorkloadSource::Profile:
        return generate(config.profile);
    case WorkloadSource::File:
        return load_workload(read_file(config.workload_path));
    case WorkloadSource::Hetjob: {
        const HetjobParse parsed = parse_hetjob(read_file(config.workload_path));
        if (!parsed.ok())
            throw ConfigError("hetjob script: " +
                              format_errors(parsed, config.workload_path));
        JobSpec job;
        job.job_id = "hetjob-0";
        job.submit_time = 0;
        job.requests = parsed.requests;
        SplitMix64 rng(config.profile.seed);
        for (const auto& tmpl : config.profile.phases) {
            Phase p;
            p.kind = tmpl.kind;
            if (tmpl.kind == PhaseKind::Classical) {
                p.classical_work = tmpl.classical_work.sample(rng);
            } else {
                p.quantum_tasks = tmpl.quantum_tasks.sample_count(rng);
                p.prep_time_per_task = std::max(0.0, tmpl.prep_time.sample(rng));
            }
            job.phases.push_back(p);
        }
        if (job.phases.empty())
            throw ConfigError("hetjob workload needs a workload.pattern with phases");
        return {job};
    }
    }
    throw ConfigError("unreachable workload source");
}

} // namespace hqsim
