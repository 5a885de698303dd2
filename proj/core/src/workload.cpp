#include "hqsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace hqsim {

using nlohmann::json;

double Dist::sample(SplitMix64& rng) const {
    return kind == Kind::Fixed ? a : rng.uniform(a, b);
}

int Dist::sample_count(SplitMix64& rng) const {
    return std::max(1, static_cast<int>(std::llround(sample(rng))));
}

std::vector<JobSpec> generate(const WorkloadProfile& profile) {
    if (profile.job_count < 0) throw InvalidProfileError("job_count must be >= 0");
    if (profile.phases.empty() && profile.job_count > 0)
        throw InvalidProfileError("profile has no phase templates");
    if (profile.arrival == ArrivalKind::Poisson && profile.rate_per_hour <= 0)
        throw InvalidProfileError("poisson arrival requires rate_per_hour > 0");
    if (profile.nodes < 0 || profile.qpu_gres < 0)
        throw InvalidProfileError("negative resource count");
    if (profile.walltime <= 0) throw InvalidProfileError("walltime must be > 0");

    SplitMix64 rng(profile.seed);
    std::vector<JobSpec> jobs;
    jobs.reserve(static_cast<size_t>(profile.job_count));
    Seconds clock = 0;
    for (int i = 0; i < profile.job_count; ++i) {
        JobSpec job;
        char id[32];
        std::snprintf(id, sizeof(id), "job-%04d", i);
        job.job_id = id;
        if (profile.arrival == ArrivalKind::Poisson) {
            // exponential inter-arrival gap, rate per hour
            clock += -std::log(1.0 - rng.next_double()) * 3600.0 / profile.rate_per_hour;
        }
        job.submit_time = clock;

        int component = 0;
        if (profile.nodes > 0) {
            ResourceRequest r;
            r.component_id = component++;
            r.partition = "classical";
            r.nodes = profile.nodes;
            r.walltime = profile.walltime;
            job.requests.push_back(r);
        }
        if (profile.qpu_gres > 0) {
            ResourceRequest r;
            r.component_id = component++;
            r.partition = "quantum";
            r.qpu_gres = profile.qpu_gres;
            r.walltime = profile.walltime;
            job.requests.push_back(r);
        }
        if (job.requests.empty())
            throw InvalidProfileError("profile requests no resources");

        for (const auto& tmpl : profile.phases) {
            Phase p;
            p.kind = tmpl.kind;
            if (tmpl.kind == PhaseKind::Classical) {
                p.classical_work = tmpl.classical_work.sample(rng);
                if (p.classical_work <= 0)
                    throw InvalidProfileError("classical_work must sample > 0");
            } else {
                p.quantum_tasks = tmpl.quantum_tasks.sample_count(rng);
                p.prep_time_per_task = std::max(0.0, tmpl.prep_time.sample(rng));
            }
            job.phases.push_back(p);
        }
        jobs.push_back(std::move(job));
    }
    return jobs;
}

QpuTechnologyProfile default_technology_profile(const std::string& name) {
    if (name == "superconducting")
        return QpuTechnologyProfile::fixed("superconducting", 10.0, 0.0);
    if (name == "neutral-atoms")
        return QpuTechnologyProfile::fixed("neutral-atoms", 1500.0, 300.0);
    // placeholder timescale, not anchored to any published figure
    if (name == "trapped-ion")
        return QpuTechnologyProfile::uniform("trapped-ion", 60.0, 300.0, 0.0);
    throw InvalidProfileError("unknown QPU technology '" + name + "'");
}

std::pair<ClusterConfig, std::vector<JobSpec>> paper_scenario(const std::string& tech) {
    if (tech != "superconducting" && tech != "neutral-atoms")
        throw InvalidProfileError("no canonical scenario for technology '" + tech + "'");

    ClusterConfig cluster;
    cluster.classical_nodes = 10;
    cluster.qpus = {{default_technology_profile(tech), 1}};
    cluster.vqpus_per_qpu = 2;

    JobSpec job;
    job.job_id = "hybrid-0";
    job.submit_time = 0;
    job.requests = {
        {0, "classical", 10, 0, 3600.0},
        {1, "quantum", 0, 1, 3600.0},
    };
    if (tech == "superconducting") {
        // 60 tasks x (50 s prep + 10 s task) fill the hour exactly; the task
        // count and prep time are scenario constants, only the 10 s task
        // duration is technology-anchored
        Phase q;
        q.kind = PhaseKind::Quantum;
        q.quantum_tasks = 60;
        q.prep_time_per_task = 50.0;
        job.phases = {q};
    } else {
        // 900 s classical, one 1800 s quantum task, 900 s classical
        Phase c;
        c.kind = PhaseKind::Classical;
        c.classical_work = 9000.0; // node-seconds on 10 nodes = 900 s
        Phase q;
        q.kind = PhaseKind::Quantum;
        q.quantum_tasks = 1;
        q.prep_time_per_task = 0.0;
        job.phases = {c, q, c};
    }
    return {std::move(cluster), {std::move(job)}};
}

// ---------------------------------------------------------------------------
// JSON-lines workload exchange

namespace {

json phase_to_json(const Phase& p) {
    json j;
    if (p.kind == PhaseKind::Classical) {
        j["kind"] = "classical";
        j["classical_work"] = p.classical_work;
    } else {
        j["kind"] = "quantum";
        j["quantum_tasks"] = p.quantum_tasks;
        j["prep_time_per_task"] = p.prep_time_per_task;
    }
    return j;
}

Phase phase_from_json(const json& j) {
    Phase p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "classical") {
        p.kind = PhaseKind::Classical;
        p.classical_work = j.at("classical_work").get<double>();
    } else if (kind == "quantum") {
        p.kind = PhaseKind::Quantum;
        p.quantum_tasks = j.at("quantum_tasks").get<int>();
        p.prep_time_per_task = j.value("prep_time_per_task", 0.0);
    } else {
        throw InvalidProfileError("unknown phase kind '" + kind + "'");
    }
    return p;
}

} // namespace

std::string save_workload(const std::vector<JobSpec>& jobs) {
    std::ostringstream out;
    for (const auto& job : jobs) {
        json j;
        j["job_id"] = job.job_id;
        j["submit_time"] = job.submit_time;
        j["requests"] = json::array();
        for (const auto& r : job.requests)
            j["requests"].push_back({{"component_id", r.component_id},
                                     {"partition", r.partition},
                                     {"nodes", r.nodes},
                                     {"qpu_gres", r.qpu_gres},
                                     {"walltime", r.walltime}});
        j["phases"] = json::array();
        for (const auto& p : job.phases) j["phases"].push_back(phase_to_json(p));
        out << j.dump() << '\n';
    }
    return out.str();
}

std::vector<JobSpec> load_workload(const std::string& text) {
    std::vector<JobSpec> jobs;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InvalidProfileError("workload line " + std::to_string(line_no) + ": " +
                                      e.what());
        }
        try {
            JobSpec job;
            job.job_id = j.at("job_id").get<std::string>();
            job.submit_time = j.at("submit_time").get<double>();
            for (const auto& rj : j.at("requests")) {
                ResourceRequest r;
                r.component_id = rj.at("component_id").get<int>();
                r.partition = rj.at("partition").get<std::string>();
                r.nodes = rj.value("nodes", 0);
                r.qpu_gres = rj.value("qpu_gres", 0);
                r.walltime = rj.at("walltime").get<double>();
                job.requests.push_back(std::move(r));
            }
            for (const auto& pj : j.at("phases")) job.phases.push_back(phase_from_json(pj));
            jobs.push_back(std::move(job));
        } catch (const json::exception& e) {
            throw InvalidProfileError("workload line " + std::to_string(line_no) + ": " +
                                      e.what());
        }
    }
    return jobs;
}

} // namespace hqsim
